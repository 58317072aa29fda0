#pragma once

#include <atomic>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pergen/corpus.hpp"
#include "pergen/generate.hpp"
#include "pergen/lexicon.hpp"
#include "pergen/prompt.hpp"
#include "pergen/ranking.hpp"
#include "pergen/weak_labels.hpp"

namespace pergen {

enum class SummarySource { none, context_independent, context_dependent_weak_label };
enum class SynthesisSource { none, context_independent, context_dependent_weak_label };

/// Immutable tables shared by every example; safe for concurrent reads.
struct PipelineContext {
    const Corpus& corpus;
    const IdfTable& idf;
    const StopwordSet& stopwords;
    const SynonymTable& synonyms;
    const WordVecTable& vectors;
};

struct RunOptions {
    RankingConfig ranking;
    PipelineConfig prompt;
    SynthesisConfig synthesis;
    SummarySource summary_source = SummarySource::context_dependent_weak_label;
    SynthesisSource synthesis_source = SynthesisSource::context_dependent_weak_label;
    std::size_t summary_budget = 500;      // lead-snippet fallback budget
    std::size_t synthesis_label_cap = 0;   // 0 = uncapped
    std::size_t jobs = 1;
};

struct PipelineBackends {
    Embedder& embedder;
    Generator& generator;
    Summarizer* summarizer = nullptr;  // external context-independent model
};

struct PreparedExample {
    std::string example_id;
    std::string prompt;
    std::string immediate_ctx;
    std::string ground_truth;
    RankedEntries entries;
    std::optional<std::string> summary;
    std::optional<std::string> synthesis;
};

namespace detail {
inline std::vector<const Document*> past_documents(const Corpus& corpus,
                                                   const GenerationExample& ex) {
    std::vector<const Document*> docs;
    docs.reserve(ex.past_doc_ids.size());
    for (const auto& id : ex.past_doc_ids) docs.push_back(&corpus.doc(id));
    return docs;
}
}  // namespace detail

/// Runs retrieval, ranking, summarization, and synthesis for one example
/// and assembles the generation prompt.
inline PreparedExample prepare_example(const GenerationExample& ex, const PipelineContext& ctx,
                                       const RunOptions& opts, Embedder& embedder,
                                       Summarizer* summarizer = nullptr) {
    PreparedExample prepared;
    prepared.example_id = ex.example_id();
    prepared.immediate_ctx = ex.immediate_context;
    prepared.ground_truth = ex.ground_truth;

    const bool need_entries = opts.prompt.include_entries ||
                              opts.summary_source != SummarySource::none ||
                              opts.synthesis_source == SynthesisSource::context_dependent_weak_label;
    auto past = detail::past_documents(ctx.corpus, ex);
    if (need_entries)
        prepared.entries = rank(past, ex.immediate_context, opts.ranking, embedder);

    switch (opts.summary_source) {
        case SummarySource::none:
            break;
        case SummarySource::context_independent:
            prepared.summary =
                context_independent_summary(prepared.entries, summarizer, opts.summary_budget)
                    .text;
            break;
        case SummarySource::context_dependent_weak_label: {
            auto current = make_snippets(ex.ground_truth, ex.current_doc_id,
                                         opts.ranking.snippet_chars);
            prepared.summary =
                summarization_weak_label(current, prepared.entries.snippet_list, embedder).joined;
            break;
        }
    }

    switch (opts.synthesis_source) {
        case SynthesisSource::none:
            break;
        case SynthesisSource::context_independent: {
            auto words =
                context_independent_keywords(past, ctx.idf, ctx.stopwords, opts.synthesis);
            std::string joined;
            for (std::size_t i = 0; i < words.size(); ++i) {
                if (i > 0) joined += ", ";
                joined += words[i];
            }
            prepared.synthesis = joined;
            break;
        }
        case SynthesisSource::context_dependent_weak_label:
            prepared.synthesis =
                synthesis_weak_label(tokenize_words(ex.ground_truth),
                                     tokenize_words(prepared.entries.joined_text), ctx.stopwords,
                                     ctx.idf, ctx.synonyms, ctx.vectors, opts.synthesis,
                                     opts.synthesis_label_cap)
                    .joined;
            break;
    }

    prepared.prompt = assemble_generation_prompt(
        ex.immediate_context, prepared.summary, prepared.synthesis,
        opts.prompt.include_entries ? std::optional<std::string>(prepared.entries.joined_text)
                                    : std::nullopt,
        opts.prompt);
    return prepared;
}

struct PipelineRow {
    std::string example_id;
    std::string prompt;
    std::string output;
    std::string ground_truth;
    bool failed = false;
    std::string error;
};

struct PipelineRun {
    std::vector<PipelineRow> rows;  // in input example order
    std::size_t failures = 0;
};

namespace detail {
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> threads;
    const std::size_t n_threads = std::min(jobs, count);
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
}
}  // namespace detail

/// Full per-example pass: rank, summarize, synthesize, assemble,
/// generate, postprocess. Per-example backend failures are recorded and
/// the run continues. Row order follows the input regardless of jobs.
inline PipelineRun run_pipeline(const std::vector<GenerationExample>& examples,
                                const PipelineContext& ctx, const RunOptions& opts,
                                const PipelineBackends& backends) {
    PipelineRun run;
    run.rows.resize(examples.size());
    std::atomic<std::size_t> failures{0};
    detail::parallel_for(examples.size(), opts.jobs, [&](std::size_t i) {
        const auto& ex = examples[i];
        PipelineRow& row = run.rows[i];
        row.example_id = ex.example_id();
        row.ground_truth = ex.ground_truth;
        try {
            auto prepared = prepare_example(ex, ctx, opts, backends.embedder, backends.summarizer);
            row.prompt = prepared.prompt;
            std::string output = backends.generator.generate(prepared.prompt);
            row.output = postprocess_prepend_start(output, ex.immediate_context);
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
            failures.fetch_add(1);
        }
    });
    run.failures = failures.load();
    return run;
}

/// Training bundles for the generation task: the assembled prompt as
/// input, the current document as target (optionally with the document
/// start removed).
inline std::vector<PromptBundle> make_generation_bundles(
    const std::vector<GenerationExample>& examples, const PipelineContext& ctx,
    const RunOptions& opts, Embedder& embedder, Summarizer* summarizer = nullptr) {
    std::vector<PromptBundle> bundles(examples.size());
    detail::parallel_for(examples.size(), opts.jobs, [&](std::size_t i) {
        auto prepared = prepare_example(examples[i], ctx, opts, embedder, summarizer);
        PromptBundle b;
        b.task = TaskKind::generation;
        b.input_text = std::move(prepared.prompt);
        if (opts.prompt.remove_doc_start_from_target)
            b.target_text = prepared.ground_truth.substr(examples[i].immediate_context.size());
        else
            b.target_text = prepared.ground_truth;
        bundles[i] = std::move(b);
    });
    return bundles;
}

struct WeakLabelRow {
    std::string example_id;
    SummaryLabel summary;
    SynthesisLabel synthesis;
};

/// Weak supervision targets for one example under a ranking config.
inline WeakLabelRow compute_weak_labels(const GenerationExample& ex, const PipelineContext& ctx,
                                        const RunOptions& opts, Embedder& embedder) {
    WeakLabelRow row;
    row.example_id = ex.example_id();
    auto past = detail::past_documents(ctx.corpus, ex);
    auto entries = rank(past, ex.immediate_context, opts.ranking, embedder);
    auto current = make_snippets(ex.ground_truth, ex.current_doc_id, opts.ranking.snippet_chars);
    row.summary = summarization_weak_label(current, entries.snippet_list, embedder);
    row.synthesis = synthesis_weak_label(
        tokenize_words(ex.ground_truth), tokenize_words(entries.joined_text), ctx.stopwords,
        ctx.idf, ctx.synonyms, ctx.vectors, opts.synthesis, opts.synthesis_label_cap);
    return row;
}

}  // namespace pergen
