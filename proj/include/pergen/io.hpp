#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pergen/corpus.hpp"
#include "pergen/jsonl.hpp"
#include "pergen/pipeline.hpp"
#include "pergen/unicode.hpp"

namespace pergen {

/// Reads the document input format: JSON-lines, one object per line with
/// user_id, doc_id, timestamp, body, and an optional title. A line that
/// is not valid JSON or lacks a required field is an error.
inline std::vector<RawRecord> load_raw_records(const std::string& path) {
    std::vector<RawRecord> records;
    std::size_t malformed = for_each_jsonl(path, [&](std::size_t line_no, const json& row) {
        auto need = [&](const char* field) {
            if (!row.contains(field))
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": missing field '" + field + "'");
        };
        need("user_id");
        need("doc_id");
        need("timestamp");
        need("body");
        RawRecord r;
        r.user_id = row["user_id"].get<std::string>();
        r.doc_id = row["doc_id"].get<std::string>();
        r.timestamp = row["timestamp"].get<std::int64_t>();
        r.body = row["body"].get<std::string>();
        if (row.contains("title") && row["title"].is_string())
            r.title = row["title"].get<std::string>();
        records.push_back(std::move(r));
    });
    if (malformed > 0)
        throw std::runtime_error(path + ": " + std::to_string(malformed) +
                                 " lines are not valid JSON");
    return records;
}

inline Corpus load_corpus(const std::string& path, IngestStats* stats = nullptr) {
    return ingest_documents(load_raw_records(path), stats);
}

inline void write_corpus_jsonl(const Corpus& corpus, const std::string& path) {
    JsonlWriter out(path);
    for (const auto& d : corpus.documents) {
        json row{{"user_id", d.user_id},
                 {"doc_id", d.doc_id},
                 {"timestamp", d.timestamp},
                 {"body", d.body}};
        if (d.title) row["title"] = *d.title;
        out.write(row);
    }
}

inline void write_split_jsonl(const UserSplit& split, const std::string& path) {
    JsonlWriter out(path);
    auto dump = [&](const std::set<std::string>& users, const char* name) {
        for (const auto& u : users) out.write(json{{"user_id", u}, {"partition", name}});
    };
    dump(split.train_users, "train");
    dump(split.validation_users, "validation");
    dump(split.test_users, "test");
}

inline UserSplit load_split_jsonl(const std::string& path) {
    UserSplit split;
    for_each_jsonl(path, [&](std::size_t line_no, const json& row) {
        std::string user = row.at("user_id").get<std::string>();
        std::string part = row.at("partition").get<std::string>();
        if (part == "train")
            split.train_users.insert(user);
        else if (part == "validation")
            split.validation_users.insert(user);
        else if (part == "test")
            split.test_users.insert(user);
        else
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": unknown partition '" + part + "'");
    });
    return split;
}

inline void write_run_jsonl(const PipelineRun& run, const std::string& path) {
    JsonlWriter out(path);
    for (const auto& row : run.rows) {
        json r{{"example_id", row.example_id},
               {"prompt", row.prompt},
               {"output", row.output},
               {"ground_truth", row.ground_truth}};
        if (row.failed) r["error"] = row.error;
        out.write(r);
    }
}

inline void write_bundles_jsonl(const std::vector<PromptBundle>& bundles,
                                const std::string& path) {
    JsonlWriter out(path);
    for (const auto& b : bundles)
        out.write(json{{"task", b.task == TaskKind::generation ? "generation" : "author_distinction"},
                       {"input", b.input_text},
                       {"target", b.target_text}});
}

inline void write_weak_labels_jsonl(const std::vector<WeakLabelRow>& rows,
                                    const std::string& path) {
    JsonlWriter out(path);
    for (const auto& row : rows)
        out.write(json{{"example_id", row.example_id},
                       {"summary_label", row.summary.joined},
                       {"synthesis_label", row.synthesis.joined}});
}

/// Dataset statistics in the style of a corpus summary table.
struct ExampleStats {
    std::size_t num_users = 0;
    std::size_t num_examples = 0;
    double avg_current_doc_chars = 0.0;
    double avg_past_docs = 0.0;
};

inline ExampleStats example_stats(const std::vector<GenerationExample>& examples) {
    ExampleStats stats;
    std::set<std::string> users;
    double chars = 0.0, past = 0.0;
    for (const auto& ex : examples) {
        users.insert(ex.user_id);
        chars += static_cast<double>(scalar_count(ex.ground_truth));
        past += static_cast<double>(ex.past_doc_ids.size());
    }
    stats.num_users = users.size();
    stats.num_examples = examples.size();
    if (!examples.empty()) {
        stats.avg_current_doc_chars = chars / static_cast<double>(examples.size());
        stats.avg_past_docs = past / static_cast<double>(examples.size());
    }
    return stats;
}

inline json stats_to_json(const ExampleStats& s) {
    return json{{"users", s.num_users},
                {"examples", s.num_examples},
                {"avg_current_doc_chars", s.avg_current_doc_chars},
                {"avg_past_docs_per_example", s.avg_past_docs}};
}

}  // namespace pergen
