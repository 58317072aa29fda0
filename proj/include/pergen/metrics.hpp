#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pergen/segment.hpp"

namespace pergen {

struct PrecisionRecallF1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

namespace detail {

inline std::unordered_map<std::string, std::size_t> ngram_counts(
    const std::vector<std::string>& tokens, std::size_t n) {
    std::unordered_map<std::string, std::size_t> counts;
    if (tokens.size() < n || n == 0) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (std::size_t k = 1; k < n; ++k) {
            key.push_back('\x1f');
            key += tokens[i + k];
        }
        ++counts[key];
    }
    return counts;
}

inline std::size_t clipped_overlap(const std::unordered_map<std::string, std::size_t>& cand,
                                   const std::unordered_map<std::string, std::size_t>& ref) {
    std::size_t overlap = 0;
    for (const auto& [gram, count] : cand) {
        auto it = ref.find(gram);
        if (it != ref.end()) overlap += std::min(count, it->second);
    }
    return overlap;
}

inline std::size_t lcs_length(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

inline double harmonic_f1(double p, double r) { return (p + r) > 0 ? 2 * p * r / (p + r) : 0.0; }

}  // namespace detail

/// Sentence-level BLEU in percent: geometric mean of modified n-gram
/// precisions for n = 1..4, add-one smoothed for n >= 2, times the
/// brevity penalty.
inline double bleu(const std::string& candidate, const std::string& reference) {
    auto cand = tokenize_words(candidate);
    auto ref = tokenize_words(reference);
    if (cand.empty() || ref.empty()) return 0.0;

    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        auto cand_counts = detail::ngram_counts(cand, n);
        auto ref_counts = detail::ngram_counts(ref, n);
        double matches = static_cast<double>(detail::clipped_overlap(cand_counts, ref_counts));
        double total = 0.0;
        for (const auto& [_, c] : cand_counts) total += static_cast<double>(c);
        double p;
        if (n == 1) {
            if (matches == 0.0) return 0.0;
            p = matches / total;
        } else {
            p = (matches + 1.0) / (total + 1.0);
        }
        log_sum += 0.25 * std::log(p);
    }
    const double c = static_cast<double>(cand.size());
    const double r = static_cast<double>(ref.size());
    const double brevity = c >= r ? 1.0 : std::exp(1.0 - r / c);
    return 100.0 * brevity * std::exp(log_sum);
}

/// Clipped n-gram overlap in percent; zero when either side has no
/// n-grams of order n.
inline PrecisionRecallF1 rouge_n(const std::string& candidate, const std::string& reference,
                                 std::size_t n) {
    if (n == 0) throw std::invalid_argument("rouge_n: n must be >= 1");
    auto cand_counts = detail::ngram_counts(tokenize_words(candidate), n);
    auto ref_counts = detail::ngram_counts(tokenize_words(reference), n);
    double cand_total = 0.0, ref_total = 0.0;
    for (const auto& [_, c] : cand_counts) cand_total += static_cast<double>(c);
    for (const auto& [_, c] : ref_counts) ref_total += static_cast<double>(c);
    PrecisionRecallF1 out;
    if (cand_total == 0.0 || ref_total == 0.0) return out;
    double overlap = static_cast<double>(detail::clipped_overlap(cand_counts, ref_counts));
    out.precision = 100.0 * overlap / cand_total;
    out.recall = 100.0 * overlap / ref_total;
    out.f1 = detail::harmonic_f1(out.precision, out.recall);
    return out;
}

/// Token-level longest-common-subsequence overlap in percent.
inline PrecisionRecallF1 rouge_l(const std::string& candidate, const std::string& reference) {
    auto cand = tokenize_words(candidate);
    auto ref = tokenize_words(reference);
    PrecisionRecallF1 out;
    if (cand.empty() || ref.empty()) return out;
    double lcs = static_cast<double>(detail::lcs_length(cand, ref));
    out.precision = 100.0 * lcs / static_cast<double>(cand.size());
    out.recall = 100.0 * lcs / static_cast<double>(ref.size());
    out.f1 = detail::harmonic_f1(out.precision, out.recall);
    return out;
}

namespace detail {

// Continued-fraction evaluation of the regularized incomplete beta
// function (Lentz's algorithm).
inline double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double eps = std::numeric_limits<double>::epsilon();
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                   b * std::log(1.0 - x);
    double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

/// Two-sided p-value of Student's t with `dof` degrees of freedom.
inline double student_t_two_sided_p(double t, double dof) {
    if (!std::isfinite(t)) return 0.0;
    return detail::incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

struct TTestResult {
    double t_statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    double mean_diff = 0.0;
};

/// Paired two-sided t-test on per-example values (a minus b). Zero
/// variance with a nonzero mean reports p = 0.
inline TTestResult paired_t_test(const std::vector<double>& values_a,
                                 const std::vector<double>& values_b) {
    if (values_a.size() != values_b.size())
        throw std::invalid_argument("paired_t_test: size mismatch");
    const std::size_t n = values_a.size();
    if (n < 2) throw std::invalid_argument("paired_t_test: need n >= 2");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += values_a[i] - values_b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = values_a[i] - values_b[i] - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    TTestResult result;
    result.n = n;
    result.mean_diff = mean;
    if (sd == 0.0) {
        if (mean == 0.0) {
            result.t_statistic = 0.0;
            result.p_value = 1.0;
        } else {
            result.t_statistic = mean > 0 ? std::numeric_limits<double>::max()
                                          : -std::numeric_limits<double>::max();
            result.p_value = 0.0;
        }
        return result;
    }
    result.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
    result.p_value =
        student_t_two_sided_p(result.t_statistic, static_cast<double>(n - 1));
    return result;
}

}  // namespace pergen
