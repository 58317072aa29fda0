#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pergen/lexicon.hpp"
#include "pergen/rng.hpp"
#include "pergen/segment.hpp"

namespace pergen {

/// Unit-norm embedding. Similarity between two of these is their dot
/// product, which equals cosine similarity.
struct EmbeddingVector {
    std::vector<double> values;

    double dot(const EmbeddingVector& other) const {
        if (values.size() != other.values.size())
            throw std::runtime_error("embedding dimension mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * other.values[i];
        return s;
    }

    double norm() const {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(s);
    }

    void normalize() {
        double n = norm();
        if (n == 0.0) throw std::runtime_error("cannot normalize zero vector");
        for (double& v : values) v /= n;
    }
};

class Embedder {
public:
    virtual ~Embedder() = default;

    /// Deterministic for a fixed text and backend; result has unit norm.
    virtual EmbeddingVector embed(std::string_view text) = 0;

    virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(embed(t));
        return out;
    }

    virtual std::size_t dim() const = 0;
};

/// Feature-hashing embedder: tokens hash to a signed coordinate, weighted
/// by sublinear term frequency times IDF when a table is attached. Fully
/// offline and deterministic; stands in for a neural dual encoder.
class HashedTfidfEmbedder : public Embedder {
public:
    explicit HashedTfidfEmbedder(std::size_t dim = 256, const IdfTable* idf = nullptr)
        : dim_(dim), idf_(idf) {
        if (dim_ == 0) throw std::invalid_argument("embedding dim must be > 0");
    }

    EmbeddingVector embed(std::string_view text) override {
        std::unordered_map<std::string, std::size_t> tf;
        for (auto& tok : tokenize_words(text)) ++tf[tok];
        EmbeddingVector v;
        v.values.assign(dim_, 0.0);
        if (tf.empty()) {
            v.values[0] = 1.0;  // fixed unit vector for token-free text
            return v;
        }
        for (const auto& [tok, count] : tf) {
            std::uint64_t h = fnv1a64(tok);
            double weight = 1.0 + std::log(static_cast<double>(count));
            if (idf_) weight *= std::max(idf_->idf(tok), 0.0) + 0.1;
            double sign = (h >> 63) ? -1.0 : 1.0;
            v.values[h % dim_] += sign * weight;
        }
        if (v.norm() == 0.0) v.values[0] = 1.0;
        v.normalize();
        return v;
    }

    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
    const IdfTable* idf_;
};

}  // namespace pergen
