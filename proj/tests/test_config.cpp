#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "pergen/config.hpp"

using namespace pergen;

namespace {
struct TempConfig {
    std::string path;
    explicit TempConfig(const std::string& content) {
        path = "pergen_conf_" + std::to_string(::rand()) + ".conf";
        std::ofstream out(path);
        out << content;
    }
    ~TempConfig() { std::remove(path.c_str()); }
};
}  // namespace

TEST_CASE("config file parsing with comments and whitespace") {
    TempConfig f("# a comment line\n"
                 "corpus = /data/corpus.jsonl   # trailing comment\n"
                 "seed=7\n"
                 "  top_k   =  12\n"
                 "\n"
                 "strategy = rank_snippet\n"
                 "remove_doc_start = true\n");
    RunConfig cfg = load_config(f.path);
    CHECK(cfg.corpus_path == "/data/corpus.jsonl");
    REQUIRE(cfg.seed.has_value());
    CHECK(*cfg.seed == 7);
    CHECK(cfg.top_k == 12);
    CHECK(cfg.strategy == "rank_snippet");
    CHECK(cfg.remove_doc_start);
}

TEST_CASE("config rejects unknown keys, bad values, and bad choices") {
    CHECK_THROWS_WITH(
        [] {
            TempConfig f("mystery_key = 1\n");
            return load_config(f.path);
        }(),
        Catch::Matchers::ContainsSubstring("mystery_key"));
    CHECK_THROWS_WITH(
        [] {
            TempConfig f("top_k = banana\n");
            return load_config(f.path);
        }(),
        Catch::Matchers::ContainsSubstring("top_k"));
    CHECK_THROWS_WITH(
        [] {
            TempConfig f("strategy = rank_everything\n");
            return load_config(f.path);
        }(),
        Catch::Matchers::ContainsSubstring("strategy"));
    CHECK_THROWS_WITH(
        [] {
            TempConfig f("not a key value line\n");
            return load_config(f.path);
        }(),
        Catch::Matchers::ContainsSubstring("key = value"));
    CHECK_THROWS(load_config("missing_config_file.conf"));
}

TEST_CASE("validate_for_run enforces required keys") {
    RunConfig cfg;
    CHECK_THROWS_WITH(validate_for_run(cfg), Catch::Matchers::ContainsSubstring("corpus"));
    cfg.corpus_path = "x.jsonl";
    CHECK_THROWS_WITH(validate_for_run(cfg), Catch::Matchers::ContainsSubstring("seed"));
    cfg.seed = 1;
    CHECK_NOTHROW(validate_for_run(cfg));
    cfg.ratios.test = 0.5;
    CHECK_THROWS_WITH(validate_for_run(cfg), Catch::Matchers::ContainsSubstring("ratios"));
    cfg.ratios.test = 0.10;
    cfg.embedder = "http";
    CHECK_THROWS_WITH(validate_for_run(cfg),
                      Catch::Matchers::ContainsSubstring("embedder_url"));
}

TEST_CASE("config hash changes iff any field changes") {
    RunConfig base;
    base.corpus_path = "corpus.jsonl";
    base.seed = 5;
    CHECK(base.hash() == base.hash());

    RunConfig same = base;
    CHECK(same.hash() == base.hash());

    auto differs = [&](auto mutate) {
        RunConfig copy = base;
        mutate(copy);
        return copy.hash() != base.hash();
    };
    CHECK(differs([](RunConfig& c) { c.seed = 6; }));
    CHECK(differs([](RunConfig& c) { c.strategy = "recent_doc"; }));
    CHECK(differs([](RunConfig& c) { c.top_k = 21; }));
    CHECK(differs([](RunConfig& c) { c.truncate_chars = 2499; }));
    CHECK(differs([](RunConfig& c) { c.qualify.min_chars = 299; }));
    CHECK(differs([](RunConfig& c) { c.summary = "weak_label"; }));
    CHECK(differs([](RunConfig& c) { c.synthesis_cfg.idf_min = 1.4; }));
    CHECK(differs([](RunConfig& c) { c.partition = "validation"; }));
    CHECK(differs([](RunConfig& c) { c.jobs = 3; }));
    CHECK(differs([](RunConfig& c) { c.embedder = "http"; }));
    CHECK(differs([](RunConfig& c) { c.n_pairs = 9999; }));
    CHECK(differs([](RunConfig& c) { c.weak_label_half = "b"; }));
}

TEST_CASE("run_options maps config onto pipeline options") {
    RunConfig cfg;
    cfg.strategy = "rank_doc_by_snpt";
    cfg.summary = "weak_label";
    cfg.synthesis = "independent";
    cfg.source_order = "immediate_ctx_at_end";
    auto opts = cfg.run_options();
    CHECK(opts.ranking.strategy == RankingStrategy::rank_doc_by_snpt);
    CHECK(opts.summary_source == SummarySource::context_dependent_weak_label);
    CHECK(opts.synthesis_source == SynthesisSource::context_independent);
    CHECK(opts.prompt.source_order == SourceOrder::immediate_ctx_at_end);
    CHECK(opts.prompt.include_entries);
    CHECK(opts.prompt.include_summary);
    CHECK(opts.prompt.include_synthesis);

    RunConfig immed;
    immed.strategy = "immed_ctx";
    immed.summary = "weak_label";  // ignored under immed_ctx
    auto immed_opts = immed.run_options();
    CHECK_FALSE(immed_opts.prompt.include_entries);
    CHECK(immed_opts.summary_source == SummarySource::none);
    CHECK(immed_opts.synthesis_source == SynthesisSource::none);
}

TEST_CASE("documented default constants survive the config layer") {
    RunConfig cfg;
    CHECK(cfg.qualify.immediate_context_chars == 150);
    CHECK(cfg.snippet_chars == 250);
    CHECK(cfg.truncate_chars == 2500);
    CHECK(cfg.synthesis_cfg.idf_min == 1.5);
    CHECK(cfg.synthesis_cfg.distance_max == 4.0);
    CHECK(cfg.synthesis_cfg.max_keywords == 20);
    CHECK(cfg.qualify.min_chars == 300);
    CHECK(cfg.qualify.min_prior_docs == 2);
    CHECK(cfg.qualify.min_examples_per_user == 5);
    CHECK(cfg.qualify.max_examples_per_user == 50);
    CHECK(cfg.ratios.train == 0.85);
    CHECK(cfg.ratios.validation == 0.05);
    CHECK(cfg.ratios.test == 0.10);
}
