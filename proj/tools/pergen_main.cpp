// pergen command-line tool: end-to-end personalized generation runs over
// JSON-lines corpora. Subcommands: ingest, split, index, run, eval,
// weak-labels, author-pairs, stats.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pergen/config.hpp"
#include "pergen/corpus.hpp"
#include "pergen/eval.hpp"
#include "pergen/http_backends.hpp"
#include "pergen/io.hpp"
#include "pergen/pipeline.hpp"

namespace fs = std::filesystem;
using namespace pergen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

struct CommonFlags {
    std::string config_path;
    std::string corpus_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "key = value config file");
    cmd->add_option("--corpus", flags.corpus_path, "corpus JSON-lines file (overrides config)");
    cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", flags.seed, "run seed (overrides config)");
    cmd->add_option("--jobs", flags.jobs, "max parallel example workers (overrides config)");
}

RunConfig effective_config(const CommonFlags& flags) {
    RunConfig cfg;
    if (!flags.config_path.empty()) cfg = load_config(flags.config_path);
    if (!flags.corpus_path.empty()) cfg.corpus_path = flags.corpus_path;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.jobs) cfg.jobs = *flags.jobs;
    return cfg;
}

struct Workspace {
    Corpus corpus;
    IngestStats ingest_stats;
    std::vector<GenerationExample> examples;  // all qualified examples
    UserSplit split;
    IdfTable idf;  // over training-partition documents
    StopwordSet stopwords;
    SynonymTable synonyms;
    WordVecTable vectors;
};

std::set<std::string> example_users(const std::vector<GenerationExample>& examples) {
    std::set<std::string> users;
    for (const auto& ex : examples) users.insert(ex.user_id);
    return users;
}

Corpus filter_corpus(const Corpus& corpus, const std::set<std::string>& keep_users) {
    std::vector<RawRecord> records;
    for (const auto& d : corpus.documents) {
        if (!keep_users.count(d.user_id)) continue;
        records.push_back(RawRecord{d.doc_id, d.user_id, d.timestamp, d.title, d.body});
    }
    return ingest_documents(records);
}

Workspace load_workspace(const RunConfig& cfg, bool need_lexicon = true) {
    if (cfg.corpus_path.empty()) throw ConfigError("config key 'corpus' is required");
    if (!cfg.seed) throw ConfigError("config key 'seed' is required");
    Workspace ws;
    ws.corpus = load_corpus(cfg.corpus_path, &ws.ingest_stats);
    ws.examples = qualify_examples(ws.corpus, cfg.qualify);
    ws.split = split_by_user(example_users(ws.examples), derive_seed(*cfg.seed, "user-split"),
                             cfg.ratios);
    if (need_lexicon) {
        ws.idf = build_idf(filter_corpus(ws.corpus, ws.split.train_users));
        ws.stopwords = cfg.stopword_file.empty() ? StopwordSet()
                                                 : StopwordSet::from_file(cfg.stopword_file);
        if (!cfg.synonym_file.empty()) ws.synonyms = SynonymTable::from_file(cfg.synonym_file);
        if (!cfg.vector_file.empty()) ws.vectors = WordVecTable::from_file(cfg.vector_file);
    }
    return ws;
}

std::vector<GenerationExample> partition_examples(const Workspace& ws, const RunConfig& cfg) {
    const std::set<std::string>* users = &ws.split.test_users;
    if (cfg.partition == "train") users = &ws.split.train_users;
    if (cfg.partition == "validation") users = &ws.split.validation_users;
    std::vector<GenerationExample> out;
    for (const auto& ex : ws.examples)
        if (users->count(ex.user_id)) out.push_back(ex);
    if (cfg.max_examples > 0 && out.size() > cfg.max_examples) out.resize(cfg.max_examples);
    return out;
}

struct Backends {
    std::unique_ptr<Embedder> embedder;
    std::unique_ptr<Generator> generator;
    std::unique_ptr<Summarizer> summarizer;  // may stay null
};

Backends make_backends(const RunConfig& cfg, const IdfTable* idf) {
    Backends b;
    if (cfg.embedder == "http")
        b.embedder = std::make_unique<HttpEmbedder>(cfg.embedder_url, cfg.embedding_dim,
                                                    cfg.http_attempts);
    else
        b.embedder = std::make_unique<HashedTfidfEmbedder>(cfg.embedding_dim, idf);
    if (cfg.generator == "http")
        b.generator = std::make_unique<HttpGenerator>(cfg.generator_url, cfg.http_attempts);
    else
        b.generator = std::make_unique<ExtractiveBaselineGenerator>();
    if (cfg.summarizer == "http")
        b.summarizer = std::make_unique<HttpSummarizer>(cfg.summarizer_url, cfg.http_attempts);
    return b;
}

void write_manifest(const fs::path& path, const RunConfig& cfg, const char* command,
                    json extra) {
    extra["command"] = command;
    extra["config_hash"] = hash_hex(cfg.hash());
    extra["seed"] = cfg.seed ? *cfg.seed : 0;
    write_file(path.string(), extra.dump(2) + "\n");
}

int cmd_ingest(const CommonFlags& flags) {
    RunConfig cfg = effective_config(flags);
    if (cfg.corpus_path.empty()) throw ConfigError("config key 'corpus' is required");
    fs::create_directories(cfg.out_dir);
    IngestStats stats;
    Corpus corpus = load_corpus(cfg.corpus_path, &stats);
    if (corpus.empty()) throw std::runtime_error("corpus has no usable documents");
    auto examples = qualify_examples(corpus, cfg.qualify);
    auto ex_stats = example_stats(examples);

    fs::path out(cfg.out_dir);
    write_corpus_jsonl(corpus, (out / "corpus.jsonl").string());
    write_manifest(out / "ingest_manifest.json", cfg, "ingest",
                   json{{"records_seen", stats.records_seen},
                        {"documents", corpus.documents.size()},
                        {"users", corpus.num_users()},
                        {"skipped_empty_body", stats.skipped_empty_body},
                        {"removed_duplicates", stats.removed_duplicates}});
    write_file((out / "stats.json").string(), stats_to_json(ex_stats).dump(2) + "\n");

    std::cout << "documents: " << corpus.documents.size() << "  users: " << corpus.num_users()
              << "  skipped_empty_body: " << stats.skipped_empty_body
              << "  removed_duplicates: " << stats.removed_duplicates << "\n"
              << "qualified examples: " << ex_stats.num_examples
              << "  qualified users: " << ex_stats.num_users
              << "  avg_current_doc_chars: " << ex_stats.avg_current_doc_chars
              << "  avg_past_docs: " << ex_stats.avg_past_docs << "\n";
    return kExitOk;
}

int cmd_split(const CommonFlags& flags) {
    RunConfig cfg = effective_config(flags);
    Workspace ws = load_workspace(cfg, /*need_lexicon=*/false);
    fs::create_directories(cfg.out_dir);
    fs::path out(cfg.out_dir);
    write_split_jsonl(ws.split, (out / "split.jsonl").string());
    write_manifest(out / "split_manifest.json", cfg, "split",
                   json{{"train_users", ws.split.train_users.size()},
                        {"validation_users", ws.split.validation_users.size()},
                        {"test_users", ws.split.test_users.size()}});
    std::cout << "train: " << ws.split.train_users.size()
              << "  validation: " << ws.split.validation_users.size()
              << "  test: " << ws.split.test_users.size() << "\n";
    return kExitOk;
}

int cmd_index(const CommonFlags& flags) {
    RunConfig cfg = effective_config(flags);
    Workspace ws = load_workspace(cfg, /*need_lexicon=*/true);
    fs::create_directories(cfg.out_dir);
    fs::path out(cfg.out_dir);

    std::map<std::string, std::size_t> sorted(ws.idf.document_frequencies().begin(),
                                              ws.idf.document_frequencies().end());
    JsonlWriter writer((out / "idf.jsonl").string());
    for (const auto& [token, df] : sorted)
        writer.write(json{{"token", token}, {"df", df}, {"idf", ws.idf.idf(token)}});
    write_manifest(out / "index_manifest.json", cfg, "index",
                   json{{"num_docs", ws.idf.num_docs()}, {"num_tokens", sorted.size()}});
    std::cout << "indexed " << sorted.size() << " tokens over " << ws.idf.num_docs()
              << " training documents\n";
    return kExitOk;
}

int cmd_run(const CommonFlags& flags) {
    RunConfig cfg = effective_config(flags);
    validate_for_run(cfg);
    Workspace ws = load_workspace(cfg);
    auto examples = partition_examples(ws, cfg);
    if (examples.empty()) throw std::runtime_error("no examples in partition " + cfg.partition);

    Backends backends = make_backends(cfg, &ws.idf);
    PipelineContext ctx{ws.corpus, ws.idf, ws.stopwords, ws.synonyms, ws.vectors};
    RunOptions opts = cfg.run_options();
    PipelineBackends pb{*backends.embedder, *backends.generator, backends.summarizer.get()};
    PipelineRun run = run_pipeline(examples, ctx, opts, pb);

    fs::create_directories(cfg.out_dir);
    fs::path out(cfg.out_dir);
    write_run_jsonl(run, (out / "run.jsonl").string());
    write_manifest(out / "run_manifest.json", cfg, "run",
                   json{{"partition", cfg.partition},
                        {"strategy", cfg.strategy},
                        {"examples", run.rows.size()},
                        {"failures", run.failures}});
    std::cout << "ran " << run.rows.size() << " examples (" << run.failures << " failed) -> "
              << (out / "run.jsonl").string() << "\n";
    return run.failures == 0 ? kExitOk : kExitRuntime;
}

int cmd_eval(const CommonFlags& flags, const std::string& run_path,
             const std::string& baseline_path, std::string report_path) {
    RunConfig cfg = effective_config(flags);
    MetricsReport report = evaluate_run(run_path);
    json out = report_to_json(report);
    if (!baseline_path.empty()) {
        MetricsReport baseline = evaluate_run(baseline_path);
        auto tests = compare_runs(report, baseline);
        json significance = json::object();
        for (const auto& [metric, t] : tests)
            significance[metric] = {{"t", t.t_statistic},
                                    {"p", t.p_value},
                                    {"n", t.n},
                                    {"mean_diff", t.mean_diff}};
        out["baseline_aggregate"] = report_to_json(baseline)["aggregate"];
        out["significance"] = significance;
    }
    if (report_path.empty()) {
        fs::create_directories(cfg.out_dir);
        report_path = (fs::path(cfg.out_dir) / "report.json").string();
    }
    write_file(report_path, out.dump(2) + "\n");
    std::cout << "n=" << report.n << "  bleu=" << report.bleu_mean
              << "  rouge1_f=" << report.rouge1_f_mean << "  rouge2_f=" << report.rouge2_f_mean
              << "  rougeL_f=" << report.rouge_l_f_mean << "\n";
    if (out.contains("significance"))
        for (const auto& [metric, t] : out["significance"].items())
            std::cout << metric << ": t=" << t["t"] << " p=" << t["p"] << "\n";
    std::cout << "report -> " << report_path << "\n";
    return kExitOk;
}

int cmd_weak_labels(const CommonFlags& flags) {
    RunConfig cfg = effective_config(flags);
    validate_for_run(cfg);
    Workspace ws = load_workspace(cfg);
    std::vector<GenerationExample> train;
    for (const auto& ex : ws.examples)
        if (ws.split.train_users.count(ex.user_id)) train.push_back(ex);

    auto halves = partition_train_halves(train, derive_seed(*cfg.seed, "train-halves"));
    std::vector<GenerationExample>* chosen = &halves.first;
    if (cfg.weak_label_half == "b") chosen = &halves.second;
    std::vector<GenerationExample> all;
    if (cfg.weak_label_half == "all") {
        all = train;
        chosen = &all;
    }
    if (cfg.max_examples > 0 && chosen->size() > cfg.max_examples)
        chosen->resize(cfg.max_examples);

    Backends backends = make_backends(cfg, &ws.idf);
    PipelineContext ctx{ws.corpus, ws.idf, ws.stopwords, ws.synonyms, ws.vectors};
    RunOptions opts = cfg.run_options();
    std::vector<WeakLabelRow> rows(chosen->size());
    detail::parallel_for(chosen->size(), opts.jobs, [&](std::size_t i) {
        rows[i] = compute_weak_labels((*chosen)[i], ctx, opts, *backends.embedder);
    });

    fs::create_directories(cfg.out_dir);
    fs::path out(cfg.out_dir);
    write_weak_labels_jsonl(rows, (out / "weak_labels.jsonl").string());
    write_manifest(out / "weak_labels_manifest.json", cfg, "weak-labels",
                   json{{"half", cfg.weak_label_half},
                        {"examples", rows.size()},
                        {"train_examples", train.size()}});
    std::cout << "wrote " << rows.size() << " weak-label rows (half " << cfg.weak_label_half
              << " of " << train.size() << " train examples)\n";
    return kExitOk;
}

int cmd_author_pairs(const CommonFlags& flags) {
    RunConfig cfg = effective_config(flags);
    validate_for_run(cfg);
    Workspace ws = load_workspace(cfg);

    // Pair documents come only from users that never appear in the
    // validation or test partitions (train users plus users that yielded
    // no qualifying examples).
    std::set<std::string> eligible;
    for (const auto& [user, _] : ws.corpus.per_user)
        if (!ws.split.validation_users.count(user) && !ws.split.test_users.count(user))
            eligible.insert(user);
    Corpus pair_corpus = filter_corpus(ws.corpus, eligible);
    auto pairs = sample_author_pairs(pair_corpus, cfg.n_pairs,
                                     derive_seed(*cfg.seed, "author-pairs"));

    std::vector<GenerationExample> train;
    for (const auto& ex : ws.examples)
        if (ws.split.train_users.count(ex.user_id)) train.push_back(ex);
    if (cfg.max_examples > 0 && train.size() > cfg.max_examples) train.resize(cfg.max_examples);
    if (train.empty()) throw std::runtime_error("no training examples to mix with");

    Backends backends = make_backends(cfg, &ws.idf);
    PipelineContext ctx{ws.corpus, ws.idf, ws.stopwords, ws.synonyms, ws.vectors};
    RunOptions opts = cfg.run_options();
    auto gen_bundles =
        make_generation_bundles(train, ctx, opts, *backends.embedder, backends.summarizer.get());
    auto mixed = mix_tasks(gen_bundles, pairs, derive_seed(*cfg.seed, "task-mix"));

    fs::create_directories(cfg.out_dir);
    fs::path out(cfg.out_dir);
    write_bundles_jsonl(pairs, (out / "author_pairs.jsonl").string());
    write_bundles_jsonl(mixed, (out / "multitask.jsonl").string());
    write_manifest(out / "author_pairs_manifest.json", cfg, "author-pairs",
                   json{{"pairs", pairs.size()},
                        {"generation_bundles", gen_bundles.size()},
                        {"mixed", mixed.size()}});
    std::cout << "wrote " << pairs.size() << " author pairs and a " << mixed.size()
              << "-item multitask stream\n";
    return kExitOk;
}

int cmd_stats(const CommonFlags& flags) {
    RunConfig cfg = effective_config(flags);
    Workspace ws = load_workspace(cfg, /*need_lexicon=*/false);
    json out = json::object();
    auto section = [&](const char* name, const std::set<std::string>& users) {
        std::vector<GenerationExample> subset;
        for (const auto& ex : ws.examples)
            if (users.count(ex.user_id)) subset.push_back(ex);
        out[name] = stats_to_json(example_stats(subset));
    };
    section("train", ws.split.train_users);
    section("validation", ws.split.validation_users);
    section("test", ws.split.test_users);
    out["overall"] = stats_to_json(example_stats(ws.examples));
    out["documents"] = ws.corpus.documents.size();
    out["corpus_users"] = ws.corpus.num_users();

    fs::create_directories(cfg.out_dir);
    write_file((fs::path(cfg.out_dir) / "stats.json").string(), out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pergen: multistage personalized text generation pipeline"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string run_path, baseline_path, report_path;

    auto* ingest = app.add_subcommand("ingest", "ingest a JSON-lines corpus and report stats");
    add_common_flags(ingest, flags);
    auto* split = app.add_subcommand("split", "partition qualified users into train/val/test");
    add_common_flags(split, flags);
    auto* index = app.add_subcommand("index", "build the IDF table over training documents");
    add_common_flags(index, flags);
    auto* run = app.add_subcommand("run", "run the generation pipeline over a partition");
    add_common_flags(run, flags);
    auto* eval = app.add_subcommand("eval", "score a run file (optionally against a baseline)");
    add_common_flags(eval, flags);
    eval->add_option("--run", run_path, "run JSON-lines file")->required();
    eval->add_option("--baseline", baseline_path, "baseline run for significance tests");
    eval->add_option("--report", report_path, "report output path");
    auto* weak = app.add_subcommand("weak-labels", "emit weak supervision label files");
    add_common_flags(weak, flags);
    auto* pairs = app.add_subcommand("author-pairs", "sample author pairs and mix tasks 1:1");
    add_common_flags(pairs, flags);
    auto* stats = app.add_subcommand("stats", "per-partition dataset statistics");
    add_common_flags(stats, flags);

    try {
        app.parse(argc, argv);
        if (ingest->parsed()) return cmd_ingest(flags);
        if (split->parsed()) return cmd_split(flags);
        if (index->parsed()) return cmd_index(flags);
        if (run->parsed()) return cmd_run(flags);
        if (eval->parsed()) return cmd_eval(flags, run_path, baseline_path, report_path);
        if (weak->parsed()) return cmd_weak_labels(flags);
        if (pairs->parsed()) return cmd_author_pairs(flags);
        if (stats->parsed()) return cmd_stats(flags);
        return kExitValidation;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
