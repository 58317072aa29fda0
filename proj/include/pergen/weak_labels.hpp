#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pergen/embedding.hpp"
#include "pergen/lexicon.hpp"
#include "pergen/ranking.hpp"
#include "pergen/segment.hpp"

namespace pergen {

/// Extractive summary target: entry snippets selected for the current
/// document's snippets, in selection order.
struct SummaryLabel {
    std::vector<std::size_t> entry_indices;  // into the ranked-entries snippet list
    std::vector<Snippet> snippets;
    std::string joined;  // space-joined snippet texts
};

/// Keyword synthesis target: candidate words with selection counts,
/// ordered by (count desc, idf desc, token asc).
struct SynthesisLabel {
    struct Word {
        std::string token;
        std::size_t count = 0;
        double idf = 0.0;
    };
    std::vector<Word> words;
    std::string joined;  // ", "-joined tokens
};

struct SynthesisConfig {
    double idf_min = 1.5;
    double distance_max = 4.0;
    std::size_t max_keywords = 20;
};

/// For each snippet of the current document (in document order), selects
/// the most similar ranked-entry snippet not yet chosen, falling through
/// to the next-highest score on duplicates. Similarity ties resolve to
/// the lower entry index.
inline SummaryLabel summarization_weak_label(const std::vector<Snippet>& current_snippets,
                                             const std::vector<Snippet>& entry_snippets,
                                             Embedder& embedder) {
    SummaryLabel label;
    if (current_snippets.empty() || entry_snippets.empty()) return label;

    std::vector<EmbeddingVector> entry_vecs;
    entry_vecs.reserve(entry_snippets.size());
    for (const auto& e : entry_snippets) entry_vecs.push_back(embedder.embed(e.text));

    std::unordered_set<std::size_t> chosen;
    for (const auto& s : current_snippets) {
        if (chosen.size() == entry_snippets.size()) break;  // nothing new left to select
        EmbeddingVector sv = embedder.embed(s.text);
        std::size_t best = entry_snippets.size();
        double best_score = 0.0;
        for (std::size_t j = 0; j < entry_snippets.size(); ++j) {
            if (chosen.count(j)) continue;
            double score = sv.dot(entry_vecs[j]);
            if (best == entry_snippets.size() || score > best_score) {
                best = j;
                best_score = score;
            }
        }
        chosen.insert(best);
        label.entry_indices.push_back(best);
        label.snippets.push_back(entry_snippets[best]);
    }
    for (std::size_t i = 0; i < label.snippets.size(); ++i) {
        if (i > 0) label.joined.push_back(' ');
        label.joined += label.snippets[i].text;
    }
    return label;
}

namespace detail {
inline bool words_similar(const std::string& source, const std::string& target,
                          const SynonymTable& synonyms, const WordVecTable& vectors,
                          double distance_max) {
    if (source == target) return true;
    if (synonyms.are_synonyms(source, target)) return true;
    auto d = word_distance(source, target, vectors);
    return d.has_value() && *d < distance_max;
}
}  // namespace detail

/// All-pairs keyword matching between the current document's words and
/// the ranked entries' words. A target word is selected once per matching
/// (source occurrence, target occurrence) pair; stopwords and words with
/// idf below the threshold are skipped on both sides. max_words = 0
/// leaves the candidate list uncapped.
inline SynthesisLabel synthesis_weak_label(const std::vector<std::string>& current_doc_tokens,
                                           const std::vector<std::string>& entry_tokens,
                                           const StopwordSet& stopwords, const IdfTable& idf,
                                           const SynonymTable& synonyms,
                                           const WordVecTable& vectors,
                                           const SynthesisConfig& config = {},
                                           std::size_t max_words = 0) {
    auto eligible = [&](const std::string& w) {
        return !stopwords.contains(w) && idf.idf(w) >= config.idf_min;
    };
    // Occurrence counts per distinct word; a (source, target) word pair
    // that matches contributes source_count * target_count selections.
    std::map<std::string, std::size_t> source_counts;
    std::map<std::string, std::size_t> target_counts;
    for (const auto& w : current_doc_tokens)
        if (eligible(w)) ++source_counts[w];
    for (const auto& v : entry_tokens)
        if (eligible(v)) ++target_counts[v];

    std::map<std::string, std::size_t> selected;
    for (const auto& [w, cw] : source_counts)
        for (const auto& [v, cv] : target_counts)
            if (detail::words_similar(w, v, synonyms, vectors, config.distance_max))
                selected[v] += cw * cv;

    SynthesisLabel label;
    for (const auto& [v, count] : selected) label.words.push_back({v, count, idf.idf(v)});
    std::sort(label.words.begin(), label.words.end(),
              [](const SynthesisLabel::Word& a, const SynthesisLabel::Word& b) {
                  if (a.count != b.count) return a.count > b.count;
                  if (a.idf != b.idf) return a.idf > b.idf;
                  return a.token < b.token;
              });
    if (max_words > 0 && label.words.size() > max_words) label.words.resize(max_words);
    for (std::size_t i = 0; i < label.words.size(); ++i) {
        if (i > 0) label.joined += ", ";
        label.joined += label.words[i].token;
    }
    return label;
}

/// Frequent unigrams over the personal context: stopwords, hapaxes, and
/// low-IDF words removed; sorted by (frequency desc, idf desc, token asc)
/// and capped at max_keywords.
inline std::vector<std::string> context_independent_keywords(
    const std::vector<const Document*>& past_docs, const IdfTable& idf,
    const StopwordSet& stopwords, const SynthesisConfig& config = {}) {
    std::map<std::string, std::size_t> freq;
    for (const Document* d : past_docs)
        for (auto& tok : tokenize_words(d->full_text())) ++freq[tok];

    struct Candidate {
        std::string token;
        std::size_t count;
        double idf;
    };
    std::vector<Candidate> candidates;
    for (const auto& [tok, count] : freq) {
        if (count <= 1) continue;
        if (stopwords.contains(tok)) continue;
        double w_idf = idf.idf(tok);
        if (w_idf < config.idf_min) continue;
        candidates.push_back({tok, count, w_idf});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.count != b.count) return a.count > b.count;
        if (a.idf != b.idf) return a.idf > b.idf;
        return a.token < b.token;
    });
    if (candidates.size() > config.max_keywords) candidates.resize(config.max_keywords);
    std::vector<std::string> out;
    out.reserve(candidates.size());
    for (auto& c : candidates) out.push_back(std::move(c.token));
    return out;
}

class Summarizer {
public:
    virtual ~Summarizer() = default;
    virtual std::string summarize(const std::string& text) = 0;
};

struct SummaryResult {
    std::string text;
    bool from_fallback = false;
    bool backend_failed = false;
};

/// External summarizer slot with a deterministic lead-snippet fallback:
/// leading snippets of the joined entries, up to `budget` scalars (the
/// first snippet is always taken).
inline SummaryResult context_independent_summary(const RankedEntries& entries,
                                                 Summarizer* summarizer,
                                                 std::size_t budget = 500) {
    SummaryResult result;
    if (summarizer) {
        try {
            result.text = summarizer->summarize(entries.joined_text);
            return result;
        } catch (const std::exception&) {
            result.backend_failed = true;
        }
    }
    result.from_fallback = true;
    std::size_t used = 0;
    for (const auto& s : entries.snippet_list) {
        if (!result.text.empty() && used + s.char_len > budget) break;
        result.text += s.text;
        used += s.char_len;
    }
    return result;
}

}  // namespace pergen
