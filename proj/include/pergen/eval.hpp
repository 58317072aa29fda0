#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pergen/jsonl.hpp"
#include "pergen/metrics.hpp"

namespace pergen {

struct ExampleMetrics {
    double bleu = 0.0;
    PrecisionRecallF1 rouge1;
    PrecisionRecallF1 rouge2;
    PrecisionRecallF1 rouge_l;
};

struct MetricsReport {
    std::map<std::string, ExampleMetrics> per_example;
    double bleu_mean = 0.0;
    double rouge1_f_mean = 0.0;
    double rouge2_f_mean = 0.0;
    double rouge_l_f_mean = 0.0;
    std::size_t n = 0;
    std::size_t malformed_lines = 0;

    std::vector<double> metric_values(const std::string& metric) const {
        std::vector<double> out;
        out.reserve(per_example.size());
        for (const auto& [_, m] : per_example) {
            if (metric == "bleu")
                out.push_back(m.bleu);
            else if (metric == "rouge1_f")
                out.push_back(m.rouge1.f1);
            else if (metric == "rouge2_f")
                out.push_back(m.rouge2.f1);
            else if (metric == "rougeL_f")
                out.push_back(m.rouge_l.f1);
            else
                throw std::invalid_argument("unknown metric: " + metric);
        }
        return out;
    }
};

inline ExampleMetrics score_example(const std::string& output, const std::string& ground_truth) {
    ExampleMetrics m;
    m.bleu = bleu(output, ground_truth);
    m.rouge1 = rouge_n(output, ground_truth, 1);
    m.rouge2 = rouge_n(output, ground_truth, 2);
    m.rouge_l = rouge_l(output, ground_truth);
    return m;
}

/// Scores a run file (JSON-lines {example_id, output, ground_truth}).
/// Malformed lines are skipped; more than 1% of them fails the run.
inline MetricsReport evaluate_run(const std::string& run_path) {
    MetricsReport report;
    std::size_t bad_rows = 0;
    std::size_t bad_json = for_each_jsonl(run_path, [&](std::size_t, const json& row) {
        if (!row.contains("example_id") || !row.contains("output") ||
            !row.contains("ground_truth") || !row["example_id"].is_string() ||
            !row["output"].is_string() || !row["ground_truth"].is_string()) {
            ++bad_rows;
            return;
        }
        report.per_example[row["example_id"].get<std::string>()] =
            score_example(row["output"].get<std::string>(), row["ground_truth"].get<std::string>());
    });
    report.malformed_lines = bad_json + bad_rows;
    report.n = report.per_example.size();
    if (report.n == 0) throw std::runtime_error("evaluate_run: no valid rows in " + run_path);
    if (100 * report.malformed_lines > report.n + report.malformed_lines)
        throw std::runtime_error("evaluate_run: more than 1% malformed lines in " + run_path);

    for (const auto& [_, m] : report.per_example) {
        report.bleu_mean += m.bleu;
        report.rouge1_f_mean += m.rouge1.f1;
        report.rouge2_f_mean += m.rouge2.f1;
        report.rouge_l_f_mean += m.rouge_l.f1;
    }
    const double n = static_cast<double>(report.n);
    report.bleu_mean /= n;
    report.rouge1_f_mean /= n;
    report.rouge2_f_mean /= n;
    report.rouge_l_f_mean /= n;
    return report;
}

inline json report_to_json(const MetricsReport& report) {
    json per_example = json::object();
    for (const auto& [id, m] : report.per_example) {
        per_example[id] = {
            {"bleu", m.bleu},
            {"rouge1", {{"p", m.rouge1.precision}, {"r", m.rouge1.recall}, {"f", m.rouge1.f1}}},
            {"rouge2", {{"p", m.rouge2.precision}, {"r", m.rouge2.recall}, {"f", m.rouge2.f1}}},
            {"rougeL", {{"p", m.rouge_l.precision}, {"r", m.rouge_l.recall}, {"f", m.rouge_l.f1}}},
        };
    }
    return json{{"n", report.n},
                {"malformed_lines", report.malformed_lines},
                {"aggregate",
                 {{"bleu", report.bleu_mean},
                  {"rouge1_f", report.rouge1_f_mean},
                  {"rouge2_f", report.rouge2_f_mean},
                  {"rougeL_f", report.rouge_l_f_mean}}},
                {"per_example", per_example}};
}

/// Per-metric paired t-tests between two runs. The runs must cover the
/// same example ids.
inline std::map<std::string, TTestResult> compare_runs(const MetricsReport& run,
                                                       const MetricsReport& baseline) {
    if (run.per_example.size() != baseline.per_example.size())
        throw std::runtime_error("compare_runs: example sets differ in size");
    for (const auto& [id, _] : run.per_example)
        if (!baseline.per_example.count(id))
            throw std::runtime_error("compare_runs: example id missing from baseline: " + id);
    std::map<std::string, TTestResult> tests;
    for (const std::string metric : {"bleu", "rouge1_f", "rouge2_f", "rougeL_f"})
        tests[metric] = paired_t_test(run.metric_values(metric), baseline.metric_values(metric));
    return tests;
}

}  // namespace pergen
