#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pergen/corpus.hpp"
#include "pergen/pipeline.hpp"
#include "pergen/rng.hpp"

namespace pergen {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything a run needs, read from a `key = value` file. Flags override
/// file keys; the seed is mandatory so every artifact is reproducible.
struct RunConfig {
    std::string corpus_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;

    // qualification (per-user example derivation)
    QualifyConfig qualify;

    // user split
    SplitRatios ratios;
    std::string partition = "test";  // which partition cmd_run scores

    // ranking
    std::string strategy = "rank_doc_by_snpt";  // or "immed_ctx"
    std::size_t top_k = 20;
    std::size_t truncate_chars = 2500;
    std::size_t snippet_chars = 250;

    // prompt composition
    bool include_entries = true;
    std::string summary = "none";    // none | independent | weak_label
    std::string synthesis = "none";  // none | independent | weak_label
    std::string source_order = "standard";
    bool remove_doc_start = false;

    // synthesis thresholds
    SynthesisConfig synthesis_cfg;
    std::size_t synthesis_label_cap = 0;
    std::size_t summary_budget = 500;

    // lexicon files (optional)
    std::string stopword_file;
    std::string synonym_file;
    std::string vector_file;

    // backends
    std::string embedder = "builtin";  // builtin | http
    std::string embedder_url;
    std::size_t embedding_dim = 256;
    std::string generator = "extractive";  // extractive | http
    std::string generator_url;
    std::string summarizer = "none";  // none | http
    std::string summarizer_url;
    int http_attempts = 3;

    // sampling / limits
    std::size_t n_pairs = 10000;
    std::size_t max_examples = 0;      // 0 = no cap
    std::string weak_label_half = "a";  // a | b | all

    RunOptions run_options() const {
        RunOptions opts;
        if (strategy != "immed_ctx") opts.ranking.strategy = ranking_strategy_from_string(strategy);
        opts.ranking.top_k = top_k;
        opts.ranking.truncate_chars = truncate_chars;
        opts.ranking.snippet_chars = snippet_chars;
        opts.prompt.include_entries = include_entries && strategy != "immed_ctx";
        opts.prompt.source_order = source_order == "immediate_ctx_at_end"
                                       ? SourceOrder::immediate_ctx_at_end
                                       : SourceOrder::standard;
        opts.prompt.remove_doc_start_from_target = remove_doc_start;
        auto summary_source = [&] {
            if (strategy == "immed_ctx" || summary == "none") return SummarySource::none;
            if (summary == "independent") return SummarySource::context_independent;
            return SummarySource::context_dependent_weak_label;
        };
        auto synthesis_source = [&] {
            if (strategy == "immed_ctx" || synthesis == "none") return SynthesisSource::none;
            if (synthesis == "independent") return SynthesisSource::context_independent;
            return SynthesisSource::context_dependent_weak_label;
        };
        opts.summary_source = summary_source();
        opts.synthesis_source = synthesis_source();
        opts.prompt.include_summary = opts.summary_source != SummarySource::none;
        opts.prompt.include_synthesis = opts.synthesis_source != SynthesisSource::none;
        opts.synthesis = synthesis_cfg;
        opts.synthesis_label_cap = synthesis_label_cap;
        opts.summary_budget = summary_budget;
        opts.jobs = jobs;
        return opts;
    }

    /// Canonical serialization of every effective field; the run manifest
    /// hashes this.
    std::string canonical() const {
        std::ostringstream out;
        out.precision(17);
        out << "corpus=" << corpus_path << '\n'
            << "out=" << out_dir << '\n'
            << "seed=" << (seed ? std::to_string(*seed) : "") << '\n'
            << "jobs=" << jobs << '\n'
            << "min_chars=" << qualify.min_chars << '\n'
            << "min_prior_docs=" << qualify.min_prior_docs << '\n'
            << "min_examples_per_user=" << qualify.min_examples_per_user << '\n'
            << "max_examples_per_user=" << qualify.max_examples_per_user << '\n'
            << "immediate_context_chars=" << qualify.immediate_context_chars << '\n'
            << "train_ratio=" << ratios.train << '\n'
            << "validation_ratio=" << ratios.validation << '\n'
            << "test_ratio=" << ratios.test << '\n'
            << "partition=" << partition << '\n'
            << "strategy=" << strategy << '\n'
            << "top_k=" << top_k << '\n'
            << "truncate_chars=" << truncate_chars << '\n'
            << "snippet_chars=" << snippet_chars << '\n'
            << "include_entries=" << include_entries << '\n'
            << "summary=" << summary << '\n'
            << "synthesis=" << synthesis << '\n'
            << "source_order=" << source_order << '\n'
            << "remove_doc_start=" << remove_doc_start << '\n'
            << "idf_min=" << synthesis_cfg.idf_min << '\n'
            << "distance_max=" << synthesis_cfg.distance_max << '\n'
            << "max_keywords=" << synthesis_cfg.max_keywords << '\n'
            << "synthesis_label_cap=" << synthesis_label_cap << '\n'
            << "summary_budget=" << summary_budget << '\n'
            << "stopword_file=" << stopword_file << '\n'
            << "synonym_file=" << synonym_file << '\n'
            << "vector_file=" << vector_file << '\n'
            << "embedder=" << embedder << '\n'
            << "embedder_url=" << embedder_url << '\n'
            << "embedding_dim=" << embedding_dim << '\n'
            << "generator=" << generator << '\n'
            << "generator_url=" << generator_url << '\n'
            << "summarizer=" << summarizer << '\n'
            << "summarizer_url=" << summarizer_url << '\n'
            << "http_attempts=" << http_attempts << '\n'
            << "n_pairs=" << n_pairs << '\n'
            << "max_examples=" << max_examples << '\n'
            << "weak_label_half=" << weak_label_half << '\n';
        return out.str();
    }

    std::uint64_t hash() const { return fnv1a64(canonical()); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config key '" + key + "' expects an unsigned integer, got '" + value +
                          "'");
    }
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config key '" + key + "' expects a number, got '" + value + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key '" + key + "' expects true/false, got '" + value + "'");
}

inline void check_choice(const std::string& key, const std::string& value,
                         std::initializer_list<const char*> choices) {
    for (const char* c : choices)
        if (value == c) return;
    std::string msg = "config key '" + key + "' got '" + value + "', expected one of:";
    for (const char* c : choices) msg += std::string(" ") + c;
    throw ConfigError(msg);
}

}  // namespace detail

inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    using namespace detail;
    if (key == "corpus") cfg.corpus_path = value;
    else if (key == "out") cfg.out_dir = value;
    else if (key == "seed") cfg.seed = parse_uint(key, value);
    else if (key == "jobs") cfg.jobs = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "min_chars") cfg.qualify.min_chars = parse_uint(key, value);
    else if (key == "min_prior_docs") cfg.qualify.min_prior_docs = parse_uint(key, value);
    else if (key == "min_examples_per_user")
        cfg.qualify.min_examples_per_user = parse_uint(key, value);
    else if (key == "max_examples_per_user")
        cfg.qualify.max_examples_per_user = parse_uint(key, value);
    else if (key == "immediate_context_chars")
        cfg.qualify.immediate_context_chars = parse_uint(key, value);
    else if (key == "train_ratio") cfg.ratios.train = parse_double(key, value);
    else if (key == "validation_ratio") cfg.ratios.validation = parse_double(key, value);
    else if (key == "test_ratio") cfg.ratios.test = parse_double(key, value);
    else if (key == "partition") {
        check_choice(key, value, {"train", "validation", "test"});
        cfg.partition = value;
    } else if (key == "strategy") {
        check_choice(key, value, {"immed_ctx", "recent_doc", "rank_doc_bm25", "rank_doc_dense",
                                  "rank_snippet", "rank_doc_by_snpt"});
        cfg.strategy = value;
    } else if (key == "top_k") cfg.top_k = parse_uint(key, value);
    else if (key == "truncate_chars") cfg.truncate_chars = parse_uint(key, value);
    else if (key == "snippet_chars") cfg.snippet_chars = parse_uint(key, value);
    else if (key == "include_entries") cfg.include_entries = parse_bool(key, value);
    else if (key == "summary") {
        check_choice(key, value, {"none", "independent", "weak_label"});
        cfg.summary = value;
    } else if (key == "synthesis") {
        check_choice(key, value, {"none", "independent", "weak_label"});
        cfg.synthesis = value;
    } else if (key == "source_order") {
        check_choice(key, value, {"standard", "immediate_ctx_at_end"});
        cfg.source_order = value;
    } else if (key == "remove_doc_start") cfg.remove_doc_start = parse_bool(key, value);
    else if (key == "idf_min") cfg.synthesis_cfg.idf_min = parse_double(key, value);
    else if (key == "distance_max") cfg.synthesis_cfg.distance_max = parse_double(key, value);
    else if (key == "max_keywords") cfg.synthesis_cfg.max_keywords = parse_uint(key, value);
    else if (key == "synthesis_label_cap") cfg.synthesis_label_cap = parse_uint(key, value);
    else if (key == "summary_budget") cfg.summary_budget = parse_uint(key, value);
    else if (key == "stopword_file") cfg.stopword_file = value;
    else if (key == "synonym_file") cfg.synonym_file = value;
    else if (key == "vector_file") cfg.vector_file = value;
    else if (key == "embedder") {
        check_choice(key, value, {"builtin", "http"});
        cfg.embedder = value;
    } else if (key == "embedder_url") cfg.embedder_url = value;
    else if (key == "embedding_dim") cfg.embedding_dim = parse_uint(key, value);
    else if (key == "generator") {
        check_choice(key, value, {"extractive", "http"});
        cfg.generator = value;
    } else if (key == "generator_url") cfg.generator_url = value;
    else if (key == "summarizer") {
        check_choice(key, value, {"none", "http"});
        cfg.summarizer = value;
    } else if (key == "summarizer_url") cfg.summarizer_url = value;
    else if (key == "http_attempts")
        cfg.http_attempts = static_cast<int>(parse_uint(key, value));
    else if (key == "n_pairs") cfg.n_pairs = parse_uint(key, value);
    else if (key == "max_examples") cfg.max_examples = parse_uint(key, value);
    else if (key == "weak_label_half") {
        check_choice(key, value, {"a", "b", "all"});
        cfg.weak_label_half = value;
    } else
        throw ConfigError("unknown config key: '" + key + "'");
}

/// Parses a `key = value` config file ('#' starts a comment).
inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        std::string trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              " is not 'key = value': " + trimmed);
        apply_config_entry(cfg, detail::trim(trimmed.substr(0, eq)),
                           detail::trim(trimmed.substr(eq + 1)));
    }
    return cfg;
}

inline void validate_for_run(const RunConfig& cfg) {
    if (cfg.corpus_path.empty()) throw ConfigError("config key 'corpus' is required");
    if (!cfg.seed.has_value()) throw ConfigError("config key 'seed' is required");
    const double sum = cfg.ratios.train + cfg.ratios.validation + cfg.ratios.test;
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("train/validation/test ratios must sum to 1.0");
    if (cfg.embedder == "http" && cfg.embedder_url.empty())
        throw ConfigError("embedder=http requires embedder_url");
    if (cfg.generator == "http" && cfg.generator_url.empty())
        throw ConfigError("generator=http requires generator_url");
    if (cfg.summarizer == "http" && cfg.summarizer_url.empty())
        throw ConfigError("summarizer=http requires summarizer_url");
}

}  // namespace pergen
