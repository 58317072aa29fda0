#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pergen/corpus.hpp"
#include "pergen/rng.hpp"

namespace pergen {

inline constexpr std::string_view kGenerationInstruction = "Finish the passage in the user voice";
inline constexpr std::string_view kAuthorInstruction =
    "Predict whether two passages are from the same author";
inline constexpr std::string_view kPassageStartPrefix = "passage start: ";
inline constexpr std::string_view kSummaryPrefix = "summary: ";
inline constexpr std::string_view kSynthesisPrefix = "important words: ";
inline constexpr std::string_view kEntriesPrefix = "past passages: ";

enum class TaskKind { generation, author_distinction };

struct PromptBundle {
    TaskKind task = TaskKind::generation;
    std::string input_text;
    std::string target_text;  // document text, or "true"/"false"
};

enum class SourceOrder { standard, immediate_ctx_at_end };

struct PipelineConfig {
    bool include_entries = true;
    bool include_summary = false;
    bool include_synthesis = false;
    SourceOrder source_order = SourceOrder::standard;
    bool remove_doc_start_from_target = false;
};

/// Builds the generation model input: the task instruction followed by
/// one prefixed block per present source, newline-separated. Sources
/// appear as immediate context, summary, synthesis, ranked entries;
/// immediate_ctx_at_end moves the immediate context block last. Blocks
/// with no text are omitted.
inline std::string assemble_generation_prompt(std::string_view immediate_ctx,
                                              const std::optional<std::string>& summary,
                                              const std::optional<std::string>& synthesis,
                                              const std::optional<std::string>& entries,
                                              const PipelineConfig& config = {}) {
    if (immediate_ctx.empty())
        throw std::invalid_argument("assemble_generation_prompt: immediate context is empty");
    std::vector<std::string> blocks;
    blocks.emplace_back(kGenerationInstruction);
    auto passage_block = std::string(kPassageStartPrefix) + std::string(immediate_ctx);
    if (config.source_order == SourceOrder::standard) blocks.push_back(passage_block);
    auto add = [&](std::string_view prefix, const std::optional<std::string>& text) {
        if (text.has_value() && !text->empty())
            blocks.push_back(std::string(prefix) + *text);
    };
    add(kSummaryPrefix, summary);
    add(kSynthesisPrefix, synthesis);
    add(kEntriesPrefix, entries);
    if (config.source_order == SourceOrder::immediate_ctx_at_end) blocks.push_back(passage_block);

    std::string prompt;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i > 0) prompt.push_back('\n');
        prompt += blocks[i];
    }
    return prompt;
}

/// Recovers block contents from an assembled prompt. A block starts where
/// its prefix appears at the beginning of a line and runs to the next
/// block marker (block text may span lines).
inline std::map<std::string, std::string> parse_prompt_blocks(std::string_view prompt) {
    static const std::string_view kPrefixes[] = {kPassageStartPrefix, kSummaryPrefix,
                                                 kSynthesisPrefix, kEntriesPrefix};
    struct Marker {
        std::size_t pos;
        std::size_t content_begin;
        std::string_view prefix;
    };
    std::vector<Marker> markers;
    for (auto prefix : kPrefixes) {
        std::size_t search = 0;
        while (search <= prompt.size()) {
            std::size_t pos = prompt.find(prefix, search);
            if (pos == std::string_view::npos) break;
            if (pos == 0 || prompt[pos - 1] == '\n') {
                markers.push_back({pos, pos + prefix.size(), prefix});
                break;  // first line-initial occurrence of each prefix
            }
            search = pos + 1;
        }
    }
    std::sort(markers.begin(), markers.end(),
              [](const Marker& a, const Marker& b) { return a.pos < b.pos; });
    std::map<std::string, std::string> blocks;
    for (std::size_t i = 0; i < markers.size(); ++i) {
        std::size_t end = (i + 1 < markers.size()) ? markers[i + 1].pos : prompt.size();
        std::string_view content = prompt.substr(markers[i].content_begin,
                                                 end - markers[i].content_begin);
        while (!content.empty() && content.back() == '\n') content.remove_suffix(1);
        std::string key(markers[i].prefix);
        key.erase(key.size() - 2);  // drop ": "
        blocks[key] = std::string(content);
    }
    return blocks;
}

/// Samples author-distinction pairs from a training corpus. Half the
/// draws pair a document with another one by the same author (label
/// "true"), half with a different author's document (label "false").
inline std::vector<PromptBundle> sample_author_pairs(const Corpus& train_corpus, std::size_t n,
                                                     std::uint64_t seed) {
    struct UserDocs {
        std::vector<const Document*> docs;
    };
    std::vector<UserDocs> users;
    std::vector<const Document*> all_docs;
    std::vector<std::size_t> user_of_doc;
    std::vector<std::size_t> multi_doc_anchor_pool;  // doc indices of users with >= 2 docs
    for (const auto& [user, doc_ids] : train_corpus.per_user) {
        UserDocs ud;
        for (const auto& id : doc_ids) ud.docs.push_back(&train_corpus.doc(id));
        for (const Document* d : ud.docs) {
            if (ud.docs.size() >= 2) multi_doc_anchor_pool.push_back(all_docs.size());
            user_of_doc.push_back(users.size());
            all_docs.push_back(d);
        }
        users.push_back(std::move(ud));
    }
    if (users.size() < 2)
        throw std::runtime_error("sample_author_pairs: need at least 2 users");

    Rng rng(seed);
    std::vector<PromptBundle> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool positive = rand_bernoulli(rng, 0.5);
        const Document* anchor = nullptr;
        const Document* partner = nullptr;
        if (positive) {
            if (multi_doc_anchor_pool.empty())
                throw std::runtime_error("sample_author_pairs: no user has 2 or more documents");
            std::size_t a = multi_doc_anchor_pool[rand_below(rng, multi_doc_anchor_pool.size())];
            anchor = all_docs[a];
            const auto& docs = users[user_of_doc[a]].docs;
            std::size_t j = rand_below(rng, docs.size() - 1);
            for (std::size_t k = 0, seen = 0; k < docs.size(); ++k) {
                if (docs[k] == anchor) continue;
                if (seen++ == j) {
                    partner = docs[k];
                    break;
                }
            }
        } else {
            std::size_t a = rand_below(rng, all_docs.size());
            anchor = all_docs[a];
            std::size_t own = users[user_of_doc[a]].docs.size();
            std::size_t j = rand_below(rng, all_docs.size() - own);
            for (std::size_t k = 0, seen = 0; k < all_docs.size(); ++k) {
                if (user_of_doc[k] == user_of_doc[a]) continue;
                if (seen++ == j) {
                    partner = all_docs[k];
                    break;
                }
            }
        }
        PromptBundle bundle;
        bundle.task = TaskKind::author_distinction;
        bundle.input_text = std::string(kAuthorInstruction) + "\npassage 1: " +
                            anchor->full_text() + "\npassage 2: " + partner->full_text();
        bundle.target_text = positive ? "true" : "false";
        out.push_back(std::move(bundle));
    }
    return out;
}

/// 1:1 interleave of two task streams, cycling the shorter one, then a
/// seeded shuffle. Both tasks contribute exactly max(|gen|, |aux|) items.
inline std::vector<PromptBundle> mix_tasks(const std::vector<PromptBundle>& gen,
                                           const std::vector<PromptBundle>& aux,
                                           std::uint64_t seed) {
    if (gen.empty() || aux.empty())
        throw std::invalid_argument("mix_tasks: both streams must be non-empty");
    const std::size_t rounds = std::max(gen.size(), aux.size());
    std::vector<PromptBundle> mixed;
    mixed.reserve(2 * rounds);
    for (std::size_t i = 0; i < rounds; ++i) {
        mixed.push_back(gen[i % gen.size()]);
        mixed.push_back(aux[i % aux.size()]);
    }
    Rng rng(seed);
    shuffle_deterministic(mixed, rng);
    return mixed;
}

}  // namespace pergen
