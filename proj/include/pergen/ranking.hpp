#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pergen/corpus.hpp"
#include "pergen/retrieval.hpp"
#include "pergen/segment.hpp"
#include "pergen/unicode.hpp"

namespace pergen {

enum class RankingStrategy {
    recent_doc,
    rank_doc_bm25,
    rank_doc_dense,
    rank_snippet,
    rank_doc_by_snpt,
};

inline RankingStrategy ranking_strategy_from_string(std::string_view name) {
    if (name == "recent_doc") return RankingStrategy::recent_doc;
    if (name == "rank_doc_bm25") return RankingStrategy::rank_doc_bm25;
    if (name == "rank_doc_dense") return RankingStrategy::rank_doc_dense;
    if (name == "rank_snippet") return RankingStrategy::rank_snippet;
    if (name == "rank_doc_by_snpt") return RankingStrategy::rank_doc_by_snpt;
    throw std::invalid_argument("unknown ranking strategy: " + std::string(name));
}

inline const char* to_string(RankingStrategy s) {
    switch (s) {
        case RankingStrategy::recent_doc: return "recent_doc";
        case RankingStrategy::rank_doc_bm25: return "rank_doc_bm25";
        case RankingStrategy::rank_doc_dense: return "rank_doc_dense";
        case RankingStrategy::rank_snippet: return "rank_snippet";
        case RankingStrategy::rank_doc_by_snpt: return "rank_doc_by_snpt";
    }
    return "?";
}

struct RankingConfig {
    RankingStrategy strategy = RankingStrategy::rank_doc_by_snpt;
    std::size_t top_k = 20;
    std::size_t truncate_chars = 2500;
    std::size_t snippet_chars = 250;
};

struct RankedEntry {
    std::string source_doc_id;
    std::string text;
    double score = 0.0;
};

/// Ranked retrieved text plus the single truncated string fed downstream.
/// snippet_list re-snippets joined_text; those are the units weak-label
/// matching works on.
struct RankedEntries {
    std::string strategy;
    std::vector<RankedEntry> entries;
    std::string joined_text;  // at most truncate_chars scalars
    std::vector<Snippet> snippet_list;
};

/// Entry texts joined with single newlines, cut to `limit` scalars on a
/// scalar boundary.
inline std::string join_and_truncate(const std::vector<std::string>& entry_texts,
                                     std::size_t limit) {
    if (limit == 0) throw std::invalid_argument("join_and_truncate: limit must be > 0");
    std::string joined;
    for (std::size_t i = 0; i < entry_texts.size(); ++i) {
        if (i > 0) joined.push_back('\n');
        joined += entry_texts[i];
    }
    return truncate_scalars(joined, limit);
}

namespace detail {

inline RankedEntries finalize(RankedEntries entries, const RankingConfig& config) {
    std::vector<std::string> texts;
    texts.reserve(entries.entries.size());
    for (const auto& e : entries.entries) texts.push_back(e.text);
    entries.joined_text = join_and_truncate(texts, config.truncate_chars);
    entries.snippet_list = make_snippets(entries.joined_text, "", config.snippet_chars);
    return entries;
}

struct SnippetRef {
    std::size_t doc_pos;      // chronological position of the source doc
    std::size_t snippet_idx;  // index within the doc
};

}  // namespace detail

/// Ranks a user's past documents (or their snippets) against the
/// immediate context and produces the joined, truncated entry string.
/// personal_docs must be in chronological order.
inline RankedEntries rank(const std::vector<const Document*>& personal_docs,
                          std::string_view immediate_ctx, const RankingConfig& config,
                          Embedder& embedder) {
    RankedEntries out;
    out.strategy = to_string(config.strategy);
    if (personal_docs.empty()) return out;

    switch (config.strategy) {
        case RankingStrategy::recent_doc: {
            // Most recent first; chronological input order makes the
            // reverse scan deterministic under timestamp ties.
            for (std::size_t k = personal_docs.size(); k > 0 && out.entries.size() < config.top_k;
                 --k) {
                const Document* d = personal_docs[k - 1];
                out.entries.push_back(
                    {d->doc_id, d->full_text(), static_cast<double>(d->timestamp)});
            }
            break;
        }
        case RankingStrategy::rank_doc_bm25: {
            Bm25Index index;
            for (const Document* d : personal_docs) index.add(d->doc_id, d->full_text());
            for (const auto& hit : index.retrieve(immediate_ctx, config.top_k)) {
                const Document* d = nullptr;
                for (const Document* cand : personal_docs)
                    if (cand->doc_id == hit.id) d = cand;
                out.entries.push_back({hit.id, d->full_text(), hit.score});
            }
            break;
        }
        case RankingStrategy::rank_doc_dense: {
            DenseIndex index(IndexGranularity::document);
            for (const Document* d : personal_docs) index.add(d->doc_id, d->full_text(), embedder);
            std::map<std::string, const Document*> by_id;
            for (const Document* d : personal_docs) by_id[d->doc_id] = d;
            for (const auto& hit : index.retrieve(immediate_ctx, config.top_k, embedder))
                out.entries.push_back({hit.id, by_id.at(hit.id)->full_text(), hit.score});
            break;
        }
        case RankingStrategy::rank_snippet:
        case RankingStrategy::rank_doc_by_snpt: {
            // Snippet pool over all past documents.
            DenseIndex index(IndexGranularity::snippet);
            std::vector<std::string> snippet_text;
            std::vector<detail::SnippetRef> refs;
            for (std::size_t pos = 0; pos < personal_docs.size(); ++pos) {
                const Document* d = personal_docs[pos];
                auto snippets = make_snippets(d->full_text(), d->doc_id, config.snippet_chars);
                for (const auto& s : snippets) {
                    std::string sid = std::to_string(refs.size());
                    index.add(sid, s.text, embedder);
                    snippet_text.push_back(s.text);
                    refs.push_back({pos, s.snippet_index});
                }
            }
            auto hits = index.retrieve(immediate_ctx, config.top_k, embedder);
            if (config.strategy == RankingStrategy::rank_snippet) {
                for (const auto& hit : hits) {
                    std::size_t ref = std::stoul(hit.id);
                    out.entries.push_back(
                        {personal_docs[refs[ref].doc_pos]->doc_id, snippet_text[ref], hit.score});
                }
            } else {
                // Document score = max over its retrieved snippets. Docs
                // without a retrieved snippet are excluded.
                std::map<std::size_t, double> doc_best;
                for (const auto& hit : hits) {
                    std::size_t pos = refs[std::stoul(hit.id)].doc_pos;
                    auto it = doc_best.find(pos);
                    if (it == doc_best.end() || hit.score > it->second) doc_best[pos] = hit.score;
                }
                std::vector<std::pair<detail::RankOrder, std::size_t>> ranked;
                for (const auto& [pos, score] : doc_best)
                    ranked.push_back({{score, pos, &personal_docs[pos]->doc_id}, pos});
                std::sort(ranked.begin(), ranked.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
                for (const auto& [order, pos] : ranked) {
                    const Document* d = personal_docs[pos];
                    out.entries.push_back({d->doc_id, d->full_text(), order.score});
                }
            }
            break;
        }
    }
    return detail::finalize(std::move(out), config);
}

}  // namespace pergen
