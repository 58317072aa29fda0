#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pergen/embedding.hpp"
#include "pergen/segment.hpp"

namespace pergen {

struct ScoredItem {
    std::string id;
    double score = 0.0;
};

namespace detail {
/// Descending score; ties go to the more recent item, then to the
/// lexicographically smaller id.
struct RankOrder {
    double score;
    std::size_t recency;  // larger = more recent
    const std::string* id;

    bool operator<(const RankOrder& o) const {
        if (score != o.score) return score > o.score;
        if (recency != o.recency) return recency > o.recency;
        return *id < *o.id;
    }
};
}  // namespace detail

/// Okapi BM25 over a small per-user collection. Items are indexed in
/// chronological order, which doubles as the recency tie-breaker.
class Bm25Index {
public:
    explicit Bm25Index(double k1 = 1.2, double b = 0.75) : k1_(k1), b_(b) {}

    void add(const std::string& id, std::string_view text) {
        if (by_id_.count(id)) throw std::runtime_error("Bm25Index: duplicate id " + id);
        Item item;
        item.id = id;
        auto tokens = tokenize_words(text);
        item.length = tokens.size();
        for (auto& t : tokens) ++item.tf[t];
        for (const auto& [t, _] : item.tf) ++df_[t];
        total_length_ += item.length;
        by_id_.emplace(id, items_.size());
        items_.push_back(std::move(item));
    }

    std::size_t size() const { return items_.size(); }
    double avg_length() const {
        return items_.empty() ? 0.0 : static_cast<double>(total_length_) /
                                          static_cast<double>(items_.size());
    }
    double k1() const { return k1_; }
    double b() const { return b_; }

    double idf(const std::string& token) const {
        auto it = df_.find(token);
        const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
        const double n = static_cast<double>(items_.size());
        return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    }

    double score(const std::vector<std::string>& query_tokens, const std::string& id) const {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) throw std::runtime_error("Bm25Index: unknown id " + id);
        return score_item(query_tokens, items_[it->second]);
    }

    /// Ranked (id, score) list, highest first, only positive scores, at
    /// most top_k entries.
    std::vector<ScoredItem> retrieve(std::string_view query, std::size_t top_k) const {
        if (top_k == 0) throw std::invalid_argument("top_k must be >= 1");
        auto query_tokens = tokenize_words(query);
        std::vector<std::pair<detail::RankOrder, std::size_t>> scored;
        for (std::size_t i = 0; i < items_.size(); ++i) {
            double s = score_item(query_tokens, items_[i]);
            if (s > 0.0) scored.push_back({{s, i, &items_[i].id}, i});
        }
        std::sort(scored.begin(), scored.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (scored.size() > top_k) scored.resize(top_k);
        std::vector<ScoredItem> out;
        out.reserve(scored.size());
        for (const auto& [order, idx] : scored) out.push_back({items_[idx].id, order.score});
        return out;
    }

private:
    struct Item {
        std::string id;
        std::unordered_map<std::string, std::size_t> tf;
        std::size_t length = 0;
    };

    double score_item(const std::vector<std::string>& query_tokens, const Item& item) const {
        const double avg = avg_length();
        double total = 0.0;
        for (const auto& t : query_tokens) {
            auto tf_it = item.tf.find(t);
            if (tf_it == item.tf.end()) continue;
            const double tf = static_cast<double>(tf_it->second);
            const double len_norm =
                k1_ * (1.0 - b_ + b_ * static_cast<double>(item.length) / avg);
            total += idf(t) * tf * (k1_ + 1.0) / (tf + len_norm);
        }
        return total;
    }

    double k1_;
    double b_;
    std::vector<Item> items_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<std::string, std::size_t> df_;
    std::size_t total_length_ = 0;
};

enum class IndexGranularity { document, snippet };

/// Exact-search dense index; items are embedded once at build time.
class DenseIndex {
public:
    explicit DenseIndex(IndexGranularity granularity) : granularity_(granularity) {}

    void add(const std::string& id, std::string_view text, Embedder& embedder) {
        Item item;
        item.id = id;
        item.vec = embedder.embed(text);
        if (!items_.empty() && item.vec.values.size() != items_.front().vec.values.size())
            throw std::runtime_error("DenseIndex: embedding dimension mismatch");
        items_.push_back(std::move(item));
    }

    IndexGranularity granularity() const { return granularity_; }
    std::size_t size() const { return items_.size(); }

    /// Cosine-ranked (id, score) list, at most top_k entries. Scores are
    /// dot products of unit vectors.
    std::vector<ScoredItem> retrieve(std::string_view query, std::size_t top_k,
                                     Embedder& embedder) const {
        if (top_k == 0) throw std::invalid_argument("top_k must be >= 1");
        EmbeddingVector q = embedder.embed(query);
        if (!items_.empty() && q.values.size() != items_.front().vec.values.size())
            throw std::runtime_error("DenseIndex: query embedding dimension mismatch");
        std::vector<detail::RankOrder> scored;
        scored.reserve(items_.size());
        for (std::size_t i = 0; i < items_.size(); ++i)
            scored.push_back({q.dot(items_[i].vec), i, &items_[i].id});
        std::sort(scored.begin(), scored.end());
        if (scored.size() > top_k) scored.resize(top_k);
        std::vector<ScoredItem> out;
        out.reserve(scored.size());
        for (const auto& s : scored) out.push_back({*s.id, s.score});
        return out;
    }

private:
    struct Item {
        std::string id;
        EmbeddingVector vec;
    };

    IndexGranularity granularity_;
    std::vector<Item> items_;
};

}  // namespace pergen
