#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pergen/corpus.hpp"
#include "pergen/segment.hpp"

namespace pergen {

/// ln(N / df) over a document corpus. Tokens never seen get df = 1, i.e.
/// idf = ln(N), the most informative score the table can assign.
class IdfTable {
public:
    IdfTable() = default;
    IdfTable(std::unordered_map<std::string, std::size_t> df, std::size_t num_docs)
        : df_(std::move(df)), num_docs_(num_docs) {}

    double idf(const std::string& token) const {
        auto it = df_.find(token);
        const double df = it == df_.end() ? 1.0 : static_cast<double>(it->second);
        return std::log(static_cast<double>(num_docs_) / df);
    }

    bool contains(const std::string& token) const { return df_.count(token) > 0; }
    std::size_t df(const std::string& token) const {
        auto it = df_.find(token);
        return it == df_.end() ? 0 : it->second;
    }
    std::size_t num_docs() const { return num_docs_; }
    const std::unordered_map<std::string, std::size_t>& document_frequencies() const { return df_; }

private:
    std::unordered_map<std::string, std::size_t> df_;
    std::size_t num_docs_ = 0;
};

inline IdfTable build_idf(const Corpus& corpus) {
    if (corpus.empty()) throw std::runtime_error("build_idf: empty corpus");
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& doc : corpus.documents) {
        std::unordered_set<std::string> seen;
        for (auto& tok : tokenize_words(doc.full_text())) seen.insert(std::move(tok));
        for (const auto& tok : seen) ++df[tok];
    }
    return IdfTable(std::move(df), corpus.documents.size());
}

namespace detail {
// Classic English stopword list (Snowball's, roughly).
inline const char* kDefaultStopwords =
    "i me my myself we our ours ourselves you your yours yourself yourselves he him his himself "
    "she her hers herself it its itself they them their theirs themselves what which who whom "
    "this that these those am is are was were be been being have has had having do does did doing "
    "a an the and but if or because as until while of at by for with about against between into "
    "through during before after above below to from up down in out on off over under again "
    "further then once here there when where why how all any both each few more most other some "
    "such no nor not only own same so than too very s t can will just don should now";
}  // namespace detail

class StopwordSet {
public:
    /// Built-in English list.
    StopwordSet() {
        std::istringstream in(detail::kDefaultStopwords);
        std::string w;
        while (in >> w) words_.insert(w);
    }

    /// Override from a file, one token per line.
    static StopwordSet from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open stopword file: " + path);
        StopwordSet s;
        s.words_.clear();
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) s.words_.insert(ascii_lower_copy(line));
        }
        return s;
    }

    bool contains(const std::string& token) const { return words_.count(token) > 0; }
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

inline bool is_stopword(const std::string& token, const StopwordSet& set) {
    return set.contains(token);
}

/// Symmetric synonym relation loaded from whitespace-separated groups,
/// one group per line. Members of a group are pairwise synonyms.
class SynonymTable {
public:
    SynonymTable() = default;

    static SynonymTable from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open synonym file: " + path);
        SynonymTable table;
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::vector<std::string> group;
            std::string w;
            while (row >> w) group.push_back(ascii_lower_copy(w));
            table.add_group(group);
        }
        return table;
    }

    void add_group(const std::vector<std::string>& group) {
        for (std::size_t i = 0; i < group.size(); ++i)
            for (std::size_t j = 0; j < group.size(); ++j)
                if (group[i] != group[j]) map_[group[i]].insert(group[j]);
    }

    bool are_synonyms(const std::string& a, const std::string& b) const {
        auto it = map_.find(a);
        return it != map_.end() && it->second.count(b) > 0;
    }

    bool symmetric() const {
        for (const auto& [a, syns] : map_)
            for (const auto& b : syns) {
                auto it = map_.find(b);
                if (it == map_.end() || it->second.count(a) == 0) return false;
            }
        return true;
    }

    std::size_t size() const { return map_.size(); }

private:
    std::unordered_map<std::string, std::unordered_set<std::string>> map_;
};

inline bool are_synonyms(const std::string& a, const std::string& b, const SynonymTable& table) {
    return table.are_synonyms(a, b);
}

/// Fixed-dimension word vectors in the standard text format
/// "word v1 ... vd", one word per line, lowercase lookup.
class WordVecTable {
public:
    WordVecTable() = default;

    static WordVecTable from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open vector file: " + path);
        WordVecTable table;
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::string word;
            if (!(row >> word)) continue;
            std::vector<double> vec;
            double v;
            while (row >> v) vec.push_back(v);
            if (vec.empty()) continue;
            table.add(ascii_lower_copy(word), std::move(vec));
        }
        return table;
    }

    void add(const std::string& word, std::vector<double> vec) {
        if (dim_ == 0) dim_ = vec.size();
        if (vec.size() != dim_)
            throw std::runtime_error("word vector dimension mismatch for: " + word);
        map_[word] = std::move(vec);
    }

    const std::vector<double>* find(const std::string& word) const {
        auto it = map_.find(word);
        return it == map_.end() ? nullptr : &it->second;
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return map_.size(); }

private:
    std::unordered_map<std::string, std::vector<double>> map_;
    std::size_t dim_ = 0;
};

/// Euclidean distance between two words' vectors; empty when either word
/// has no vector.
inline std::optional<double> word_distance(const std::string& a, const std::string& b,
                                           const WordVecTable& table) {
    const auto* va = table.find(a);
    const auto* vb = table.find(b);
    if (!va || !vb) return std::nullopt;
    double sum = 0.0;
    for (std::size_t i = 0; i < va->size(); ++i) {
        double d = (*va)[i] - (*vb)[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace pergen
