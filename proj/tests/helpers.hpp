#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles
// re-derive expected values from first principles and must not reuse the
// library's computation paths.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "pergen/corpus.hpp"
#include "pergen/embedding.hpp"
#include "pergen/lexicon.hpp"
#include "pergen/rng.hpp"
#include "pergen/segment.hpp"

namespace testutil {

/// Embedder with hand-assigned unit vectors per exact text.
class FixedEmbedder : public pergen::Embedder {
public:
    explicit FixedEmbedder(std::size_t dim) : dim_(dim) {}

    void set(const std::string& text, std::vector<double> values) {
        pergen::EmbeddingVector v{std::move(values)};
        v.normalize();
        map_[text] = std::move(v);
    }

    pergen::EmbeddingVector embed(std::string_view text) override {
        auto it = map_.find(std::string(text));
        if (it == map_.end())
            throw std::runtime_error("FixedEmbedder: unmapped text: " + std::string(text));
        return it->second;
    }

    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
    std::map<std::string, pergen::EmbeddingVector> map_;
};

inline pergen::Document make_doc(std::string user, std::string id, std::int64_t ts,
                                 std::string body, std::optional<std::string> title = {}) {
    pergen::Document d;
    d.user_id = std::move(user);
    d.doc_id = std::move(id);
    d.timestamp = ts;
    d.title = std::move(title);
    d.body = std::move(body);
    return d;
}

inline pergen::RawRecord to_record(const pergen::Document& d) {
    return pergen::RawRecord{d.doc_id, d.user_id, d.timestamp, d.title, d.body};
}

/// Random sentence-ish text over a small vocabulary.
inline std::string random_text(pergen::Rng& rng, std::size_t n_words,
                               const std::vector<std::string>& vocab) {
    std::string out;
    for (std::size_t i = 0; i < n_words; ++i) {
        if (!out.empty()) out.push_back(' ');
        out += vocab[pergen::rand_below(rng, vocab.size())];
        if (i % 7 == 6) out.push_back('.');
    }
    if (out.empty() || out.back() != '.') out.push_back('.');
    return out;
}

inline std::vector<std::string> default_vocab() {
    return {"apple", "river",  "stone",  "cloud", "ember",  "forest", "quill",
            "lantern", "meadow", "harbor", "violet", "saddle", "copper", "marble",
            "willow", "anchor", "breeze", "candle", "drift",  "falcon"};
}

// ---------------------------------------------------------------------
// Deterministic fixture: one writer ("fiona") with five sailing diary
// entries (the fifth is the current document) and one writer ("gil")
// with five cooking notes. Texts are fixed so prompt goldens stay
// byte-stable.

inline std::vector<pergen::RawRecord> golden_fixture_records() {
    using R = pergen::RawRecord;
    std::vector<R> records;
    records.push_back(R{"f1", "fiona", 100, std::string("Sailing notes"),
        "The harbor was calm when we slipped the mooring lines before sunrise. "
        "Our vessel handled the light chop without complaint, and the mainsail "
        "needed only one reef. I logged the bearings at every marker buoy. "
        "By midday the breeze freshened and we tacked twice before the jetty."});
    records.push_back(R{"f2", "fiona", 200, std::string("Garden log"),
        "Tomatoes came in early this year, and the basil finally recovered from "
        "the late frost. I staked the beans along the south fence and thinned "
        "the carrots. The compost pile needs turning again. If the weather "
        "holds I will plant the squash rows before the weekend."});
    records.push_back(R{"f3", "fiona", 300, std::nullopt,
        "Spent the evening splicing rope and checking the rigging. The shrouds "
        "were slack on the port side, so I tightened the turnbuckles a quarter "
        "turn each. The old winch still sticks under load. A rigger at the "
        "yard quoted a fair price for new halyards next season."});
    records.push_back(R{"f4", "fiona", 400, std::string("Harbor crossing"),
        "We crossed the outer harbor at dawn against an ebbing tide. The "
        "channel markers were hard to spot in the haze, so we steered by "
        "compass and kept the engine idling as a precaution. A ferry passed "
        "close enough to rock us with its wake. The crossing took three hours "
        "and the log shows nine nautical miles."});
    records.push_back(R{"f5", "fiona", 500, std::string("Night sail"),
        "A night sail across the harbor under a full moon. The moonlight made "
        "the channel markers easy to follow and the tide ran with us. Our "
        "vessel ghosted along at four knots while the rigging hummed softly. "
        "I kept the log current at each buoy and we reached the far jetty "
        "before the dusk watch ended, tired but satisfied."});
    const char* gil_bodies[5] = {
        "Braised the short ribs for six hours with star anise and a strip of "
        "orange peel. The broth reduced to a glaze that coated the spoon. "
        "Served over polenta with charred scallions on the side.",
        "Tried a sourdough with forty percent whole wheat. The crumb came out "
        "tighter than last week but the crust sang when it cooled. Next time "
        "I will push the hydration two points higher.",
        "Pickled a jar of green beans with dill, mustard seed, and a dried "
        "chili. The brine ratio was three to two to one. They should be ready "
        "in ten days if the seal holds.",
        "Made stock from the weekend roast bones. Skimmed it twice and let it "
        "barely simmer overnight. The gelatin set firm in the fridge, which "
        "bodes well for the ramen experiment.",
        "A simple frittata with the garden chard and too much gruyere. The "
        "pan was hotter than it should have been, so the bottom browned fast. "
        "Still disappeared before it cooled."};
    for (int i = 0; i < 5; ++i)
        records.push_back(R{"g" + std::to_string(i + 1), "gil",
                            150 + 100 * static_cast<std::int64_t>(i), std::nullopt,
                            gil_bodies[i]});
    return records;
}

inline pergen::Corpus golden_fixture_corpus() {
    return pergen::ingest_documents(golden_fixture_records());
}

inline pergen::GenerationExample golden_fixture_example(const pergen::Corpus& corpus) {
    pergen::GenerationExample ex;
    ex.user_id = "fiona";
    ex.current_doc_id = "f5";
    ex.ground_truth = corpus.doc("f5").full_text();
    ex.immediate_context = pergen::truncate_scalars(ex.ground_truth, 150);
    ex.past_doc_ids = {"f1", "f2", "f3", "f4"};
    return ex;
}

/// Lexicon tables for the golden fixture: built-in stopwords, IDF over
/// the whole fixture corpus, one synonym group, and a toy vector table.
struct GoldenLexicon {
    pergen::IdfTable idf;
    pergen::StopwordSet stopwords;
    pergen::SynonymTable synonyms;
    pergen::WordVecTable vectors;

    explicit GoldenLexicon(const pergen::Corpus& corpus) {
        idf = pergen::build_idf(corpus);
        synonyms.add_group({"boat", "vessel"});
        vectors.add("dawn", {0.0, 0.0});
        vectors.add("dusk", {2.0, 0.0});
        vectors.add("tomatoes", {50.0, 0.0});
    }
};

// ---------------------------------------------------------------------
// BM25 oracle: direct evaluation of the Okapi formula from raw texts.

struct Bm25OracleDoc {
    std::string id;
    std::vector<std::string> tokens;
};

inline double bm25_oracle_score(const std::vector<Bm25OracleDoc>& docs,
                                const std::vector<std::string>& query,
                                const std::string& doc_id, double k1 = 1.2, double b = 0.75) {
    const double n = static_cast<double>(docs.size());
    double total_len = 0;
    for (const auto& d : docs) total_len += static_cast<double>(d.tokens.size());
    const double avg_len = total_len / n;

    const Bm25OracleDoc* target = nullptr;
    for (const auto& d : docs)
        if (d.id == doc_id) target = &d;

    double score = 0.0;
    for (const auto& q : query) {
        double df = 0;
        for (const auto& d : docs) {
            bool has = false;
            for (const auto& t : d.tokens)
                if (t == q) has = true;
            if (has) df += 1;
        }
        double tf = 0;
        for (const auto& t : target->tokens)
            if (t == q) tf += 1;
        if (tf == 0) continue;
        double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
        double len = static_cast<double>(target->tokens.size());
        score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avg_len));
    }
    return score;
}

// ---------------------------------------------------------------------
// Summarization weak-label oracle: literal transcription of the
// procedure (per current snippet, argmax over entry snippets, fall
// through already-selected ones; ties to the lower index).

inline std::vector<std::size_t> summary_label_oracle(
    const std::vector<std::string>& current_texts, const std::vector<std::string>& entry_texts,
    pergen::Embedder& embedder) {
    std::vector<pergen::EmbeddingVector> entry_vecs;
    for (const auto& t : entry_texts) entry_vecs.push_back(embedder.embed(t));
    std::vector<std::size_t> selected;
    std::set<std::size_t> in_list;
    for (const auto& cur : current_texts) {
        auto cur_vec = embedder.embed(cur);
        // Rank all entries by score descending (stable on index).
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t j = 0; j < entry_texts.size(); ++j)
            ranked.push_back({cur_vec.dot(entry_vecs[j]), j});
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            return a.first > b.first;
        });
        for (const auto& [score, j] : ranked) {
            if (in_list.count(j)) continue;  // duplicate: fall through to next highest
            selected.push_back(j);
            in_list.insert(j);
            break;
        }
    }
    return selected;
}

// ---------------------------------------------------------------------
// Synthesis weak-label oracle: iterate every (source occurrence, target
// occurrence) pair and apply the three similarity rules.

struct SynthesisOracleResult {
    std::map<std::string, std::size_t> counts;
    std::vector<std::string> ordered;
};

inline SynthesisOracleResult synthesis_label_oracle(
    const std::vector<std::string>& source_tokens, const std::vector<std::string>& target_tokens,
    const pergen::StopwordSet& stop, const pergen::IdfTable& idf,
    const pergen::SynonymTable& syn, const pergen::WordVecTable& vec, double idf_min,
    double distance_max) {
    SynthesisOracleResult result;
    for (const auto& w : source_tokens) {
        if (stop.contains(w) || idf.idf(w) < idf_min) continue;
        for (const auto& v : target_tokens) {
            if (stop.contains(v) || idf.idf(v) < idf_min) continue;
            bool similar = (w == v) || syn.are_synonyms(w, v);
            if (!similar) {
                auto d = pergen::word_distance(w, v, vec);
                similar = d.has_value() && *d < distance_max;
            }
            if (similar) ++result.counts[v];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> items(result.counts.begin(),
                                                           result.counts.end());
    std::sort(items.begin(), items.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        double ia = idf.idf(a.first), ib = idf.idf(b.first);
        if (ia != ib) return ia > ib;
        return a.first < b.first;
    });
    for (const auto& [tok, _] : items) result.ordered.push_back(tok);
    return result;
}

// ---------------------------------------------------------------------
// rank_doc_by_snpt oracle: embed every snippet, take the global top-k
// snippet pool, score each document by the max over its pooled snippets.

inline std::vector<std::string> rank_doc_by_snpt_oracle(
    const std::vector<const pergen::Document*>& docs, const std::string& query,
    std::size_t top_k, pergen::Embedder& embedder, std::size_t snippet_chars = 250) {
    auto qv = embedder.embed(query);
    struct Snip {
        double score;
        std::size_t insert_idx;
        std::size_t doc_pos;
    };
    std::vector<Snip> snips;
    for (std::size_t pos = 0; pos < docs.size(); ++pos) {
        for (const auto& s :
             pergen::make_snippets(docs[pos]->full_text(), docs[pos]->doc_id, snippet_chars)) {
            snips.push_back({qv.dot(embedder.embed(s.text)), snips.size(), pos});
        }
    }
    std::sort(snips.begin(), snips.end(), [](const Snip& a, const Snip& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.insert_idx > b.insert_idx;  // more recent insertion wins ties
    });
    if (snips.size() > top_k) snips.resize(top_k);

    std::map<std::size_t, double> doc_best;
    for (const auto& s : snips) {
        auto it = doc_best.find(s.doc_pos);
        if (it == doc_best.end() || s.score > it->second) doc_best[s.doc_pos] = s.score;
    }
    std::vector<std::pair<double, std::size_t>> ranked;
    for (const auto& [pos, score] : doc_best) ranked.push_back({score, pos});
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second > b.second;  // newer document wins ties
    });
    std::vector<std::string> out;
    for (const auto& [_, pos] : ranked) out.push_back(docs[pos]->doc_id);
    return out;
}

// ---------------------------------------------------------------------
// LCS oracle: full-matrix dynamic program (independent of the library's
// rolling-array version).

inline std::size_t lcs_oracle(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
    std::vector<std::vector<std::size_t>> dp(a.size() + 1,
                                             std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1
                                            : std::max(dp[i - 1][j], dp[i][j - 1]);
    return dp[a.size()][b.size()];
}

// ---------------------------------------------------------------------
// Student-t two-sided p oracle by numeric integration of the density
// (tan substitution maps the tail to a finite interval).

inline double t_density(double x, double dof) {
    double c = std::lgamma((dof + 1.0) / 2.0) - std::lgamma(dof / 2.0) -
               0.5 * std::log(dof * 3.14159265358979323846);
    return std::exp(c - (dof + 1.0) / 2.0 * std::log1p(x * x / dof));
}

inline double t_two_sided_p_oracle(double t, double dof) {
    const double a = std::fabs(t);
    // tail = \int_a^inf f(x) dx with x = a + tan(theta), theta in [0, pi/2)
    const std::size_t n = 40000;  // Simpson over theta
    const double h = (3.14159265358979323846 / 2.0 - 1e-12) / static_cast<double>(n);
    auto g = [&](double theta) {
        double tn = std::tan(theta);
        double sec2 = 1.0 + tn * tn;
        return t_density(a + tn, dof) * sec2;
    };
    double sum = g(0.0) + g(static_cast<double>(n) * h);
    for (std::size_t i = 1; i < n; ++i)
        sum += g(static_cast<double>(i) * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return 2.0 * sum * h / 3.0;
}

}  // namespace testutil
