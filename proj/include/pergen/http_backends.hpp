#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "pergen/embedding.hpp"
#include "pergen/generate.hpp"
#include "pergen/weak_labels.hpp"

namespace pergen {

struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

struct ParsedUrl {
    std::string scheme_host_port;  // e.g. "http://127.0.0.1:8080"
    std::string path;              // e.g. "/embed"
};

inline ParsedUrl parse_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw std::invalid_argument("invalid url: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

inline nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                                int attempts) {
    ParsedUrl parsed = parse_url(url);
    std::string last_error;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        httplib::Client client(parsed.scheme_host_port);
        client.set_read_timeout(30, 0);
        auto res = client.Post(parsed.path, body.dump(), "application/json");
        if (!res) {
            last_error = "connection failed";
            continue;
        }
        if (res->status != 200) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        auto parsed_body = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed_body.is_discarded()) {
            last_error = "invalid JSON in response";
            continue;
        }
        return parsed_body;
    }
    throw BackendError("backend " + url + " failed after " + std::to_string(attempts) +
                       " attempts: " + last_error);
}

}  // namespace detail

/// Embedding service client. Contract: POST {"texts": [string, ...]} ->
/// {"vectors": [[number, ...], ...]}, constant dimension per service.
/// Received vectors are normalized to unit length.
class HttpEmbedder : public Embedder {
public:
    HttpEmbedder(std::string url, std::size_t expected_dim, int attempts = 3)
        : url_(std::move(url)), dim_(expected_dim), attempts_(attempts) {}

    EmbeddingVector embed(std::string_view text) override {
        auto batch = embed_batch({std::string(text)});
        return batch.front();
    }

    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override {
        nlohmann::json body{{"texts", texts}};
        auto response = detail::post_json(url_, body, attempts_);
        if (!response.contains("vectors") || !response["vectors"].is_array() ||
            response["vectors"].size() != texts.size())
            throw BackendError("embedding service returned malformed vectors array");
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto& row : response["vectors"]) {
            if (!row.is_array() || row.size() != dim_)
                throw BackendError("embedding service returned wrong dimension (expected " +
                                   std::to_string(dim_) + ", got " +
                                   std::to_string(row.size()) + ")");
            EmbeddingVector v;
            v.values.reserve(dim_);
            for (const auto& x : row) v.values.push_back(x.get<double>());
            if (v.norm() == 0.0) throw BackendError("embedding service returned a zero vector");
            v.normalize();
            out.push_back(std::move(v));
        }
        return out;
    }

    std::size_t dim() const override { return dim_; }

private:
    std::string url_;
    std::size_t dim_;
    int attempts_;
};

/// Generation service client. Contract: POST {"prompt": string} ->
/// {"text": string}.
class HttpGenerator : public Generator {
public:
    explicit HttpGenerator(std::string url, int attempts = 3)
        : url_(std::move(url)), attempts_(attempts) {}

    std::string generate(const std::string& prompt) override {
        auto response = detail::post_json(url_, nlohmann::json{{"prompt", prompt}}, attempts_);
        if (!response.contains("text") || !response["text"].is_string())
            throw BackendError("generation service response lacks a \"text\" string");
        return response["text"].get<std::string>();
    }

private:
    std::string url_;
    int attempts_;
};

/// Summarization service client. Contract: POST {"text": string} ->
/// {"summary": string}.
class HttpSummarizer : public Summarizer {
public:
    explicit HttpSummarizer(std::string url, int attempts = 3)
        : url_(std::move(url)), attempts_(attempts) {}

    std::string summarize(const std::string& text) override {
        auto response = detail::post_json(url_, nlohmann::json{{"text", text}}, attempts_);
        if (!response.contains("summary") || !response["summary"].is_string())
            throw BackendError("summarization service response lacks a \"summary\" string");
        return response["summary"].get<std::string>();
    }

private:
    std::string url_;
    int attempts_;
};

}  // namespace pergen
