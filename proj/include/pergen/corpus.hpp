#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pergen/rng.hpp"
#include "pergen/unicode.hpp"

namespace pergen {

/// One user-authored text. full_text() is what every downstream stage
/// consumes: title + '\n' + body when a title exists, else the body.
struct Document {
    std::string doc_id;
    std::string user_id;
    std::int64_t timestamp = 0;  // epoch seconds
    std::optional<std::string> title;
    std::string body;

    std::string full_text() const {
        if (title.has_value()) return *title + "\n" + body;
        return body;
    }
};

struct Corpus {
    std::vector<Document> documents;  // sorted by (user_id, timestamp, doc_id)
    std::map<std::string, std::vector<std::string>> per_user;  // chronological doc_ids

    std::unordered_map<std::string, std::size_t> index_by_id;

    const Document& doc(const std::string& doc_id) const {
        auto it = index_by_id.find(doc_id);
        if (it == index_by_id.end()) throw std::runtime_error("unknown doc_id: " + doc_id);
        return documents[it->second];
    }

    bool empty() const { return documents.empty(); }
    std::size_t num_users() const { return per_user.size(); }
};

/// One training/eval instance: the immediate context of a current
/// document plus everything the user wrote before it.
struct GenerationExample {
    std::string user_id;
    std::string current_doc_id;
    std::string immediate_context;
    std::vector<std::string> past_doc_ids;  // chronological
    std::string ground_truth;

    std::string example_id() const { return user_id + "/" + current_doc_id; }
};

struct UserSplit {
    std::set<std::string> train_users;
    std::set<std::string> validation_users;
    std::set<std::string> test_users;
};

struct IngestStats {
    std::size_t records_seen = 0;
    std::size_t skipped_empty_body = 0;
    std::size_t removed_duplicates = 0;
};

struct RawRecord {
    std::string doc_id;
    std::string user_id;
    std::int64_t timestamp = 0;
    std::optional<std::string> title;
    std::string body;
};

namespace detail {
inline bool chrono_less(const Document& a, const Document& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.doc_id < b.doc_id;
}
}  // namespace detail

/// Builds a Corpus from raw records: rejects duplicate doc_ids, skips
/// empty bodies, and removes per-user (title, body) duplicates keeping
/// the chronologically earliest. The result is canonical: independent of
/// input record order.
inline Corpus ingest_documents(const std::vector<RawRecord>& records, IngestStats* stats = nullptr) {
    IngestStats local;
    std::unordered_set<std::string> seen_ids;
    std::vector<Document> docs;
    docs.reserve(records.size());
    for (const auto& r : records) {
        ++local.records_seen;
        if (!seen_ids.insert(r.doc_id).second)
            throw std::runtime_error("duplicate doc_id: " + r.doc_id);
        if (r.body.empty()) {
            ++local.skipped_empty_body;
            continue;
        }
        docs.push_back(Document{r.doc_id, r.user_id, r.timestamp, r.title, r.body});
    }

    std::sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) {
        if (a.user_id != b.user_id) return a.user_id < b.user_id;
        return detail::chrono_less(a, b);
    });

    // Per-user dedup on exact (title, body); chronological order means the
    // first occurrence kept is the earliest.
    Corpus corpus;
    std::map<std::string, std::set<std::pair<std::optional<std::string>, std::string>>> seen_text;
    for (auto& d : docs) {
        auto key = std::make_pair(d.title, d.body);
        if (!seen_text[d.user_id].insert(key).second) {
            ++local.removed_duplicates;
            continue;
        }
        corpus.per_user[d.user_id].push_back(d.doc_id);
        corpus.index_by_id.emplace(d.doc_id, corpus.documents.size());
        corpus.documents.push_back(std::move(d));
    }
    if (stats) *stats = local;
    return corpus;
}

/// First `k` Unicode scalars of the document's full text.
inline std::string immediate_context(const Document& doc, std::size_t k = 150) {
    if (k == 0) throw std::invalid_argument("immediate_context: k must be > 0");
    return truncate_scalars(doc.full_text(), k);
}

struct QualifyConfig {
    std::size_t min_chars = 300;
    std::size_t min_prior_docs = 2;
    std::size_t min_examples_per_user = 5;
    std::size_t max_examples_per_user = 50;
    std::size_t immediate_context_chars = 150;
};

/// Derives generation examples: a document qualifies as a current document
/// when its full text exceeds min_chars scalars and the user has at least
/// min_prior_docs earlier documents. Users with too few qualifying
/// examples are dropped; at most max_examples_per_user (the latest) kept.
inline std::vector<GenerationExample> qualify_examples(const Corpus& corpus,
                                                       const QualifyConfig& cfg = {}) {
    std::vector<GenerationExample> out;
    for (const auto& [user, doc_ids] : corpus.per_user) {
        std::vector<GenerationExample> user_examples;
        for (std::size_t i = 0; i < doc_ids.size(); ++i) {
            if (i < cfg.min_prior_docs) continue;
            const Document& d = corpus.doc(doc_ids[i]);
            std::string full = d.full_text();
            if (scalar_count(full) <= cfg.min_chars) continue;
            GenerationExample ex;
            ex.user_id = user;
            ex.current_doc_id = d.doc_id;
            ex.ground_truth = std::move(full);
            ex.immediate_context = truncate_scalars(ex.ground_truth, cfg.immediate_context_chars);
            ex.past_doc_ids.assign(doc_ids.begin(), doc_ids.begin() + static_cast<long>(i));
            user_examples.push_back(std::move(ex));
        }
        if (user_examples.size() < cfg.min_examples_per_user) continue;
        if (user_examples.size() > cfg.max_examples_per_user) {
            user_examples.erase(user_examples.begin(),
                                user_examples.end() - static_cast<long>(cfg.max_examples_per_user));
        }
        for (auto& ex : user_examples) out.push_back(std::move(ex));
    }
    return out;
}

struct SplitRatios {
    double train = 0.85;
    double validation = 0.05;
    double test = 0.10;
};

/// Seeded user-level partition: train gets floor(train·N), validation
/// floor(validation·N), the remainder goes to test.
inline UserSplit split_by_user(const std::set<std::string>& users, std::uint64_t seed,
                               const SplitRatios& ratios = {}) {
    if (std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9)
        throw std::invalid_argument("split ratios must sum to 1.0");
    if (users.size() < 3)
        throw std::runtime_error("split_by_user: need at least 3 users to populate all partitions");
    std::vector<std::string> order(users.begin(), users.end());
    Rng rng(seed);
    shuffle_deterministic(order, rng);
    const auto n = order.size();
    const auto n_train = static_cast<std::size_t>(ratios.train * static_cast<double>(n));
    const auto n_val = static_cast<std::size_t>(ratios.validation * static_cast<double>(n));
    UserSplit split;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_train)
            split.train_users.insert(order[i]);
        else if (i < n_train + n_val)
            split.validation_users.insert(order[i]);
        else
            split.test_users.insert(order[i]);
    }
    return split;
}

/// User-level halving of a training example set. User counts of the two
/// halves differ by at most one; the first half gets the extra user.
inline std::pair<std::vector<GenerationExample>, std::vector<GenerationExample>>
partition_train_halves(const std::vector<GenerationExample>& examples, std::uint64_t seed) {
    std::set<std::string> user_set;
    for (const auto& ex : examples) user_set.insert(ex.user_id);
    std::vector<std::string> order(user_set.begin(), user_set.end());
    Rng rng(seed);
    shuffle_deterministic(order, rng);
    std::unordered_set<std::string> half_a_users;
    const std::size_t a_count = (order.size() + 1) / 2;
    for (std::size_t i = 0; i < a_count; ++i) half_a_users.insert(order[i]);
    std::pair<std::vector<GenerationExample>, std::vector<GenerationExample>> halves;
    for (const auto& ex : examples) {
        if (half_a_users.count(ex.user_id))
            halves.first.push_back(ex);
        else
            halves.second.push_back(ex);
    }
    return halves;
}

}  // namespace pergen
