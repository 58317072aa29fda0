#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "pergen/prompt.hpp"
#include "pergen/unicode.hpp"

namespace pergen {

class Generator {
public:
    virtual ~Generator() = default;
    virtual std::string generate(const std::string& prompt) = 0;
};

/// Deterministic no-model baseline: emits the summary block when present,
/// else the first 300 scalars of the past-passages block, else echoes the
/// immediate context. Makes retrieval and summarization quality visible
/// in the metrics without any trained model.
class ExtractiveBaselineGenerator : public Generator {
public:
    explicit ExtractiveBaselineGenerator(std::size_t entry_budget = 300)
        : entry_budget_(entry_budget) {}

    std::string generate(const std::string& prompt) override {
        if (prompt.empty()) throw std::invalid_argument("generate: empty prompt");
        auto blocks = parse_prompt_blocks(prompt);
        if (auto it = blocks.find("summary"); it != blocks.end() && !it->second.empty())
            return it->second;
        if (auto it = blocks.find("past passages"); it != blocks.end() && !it->second.empty())
            return truncate_scalars(it->second, entry_budget_);
        if (auto it = blocks.find("passage start"); it != blocks.end()) return it->second;
        return "";
    }

private:
    std::size_t entry_budget_;
};

/// Prepends the document start to the model output unless the output
/// already begins with it.
inline std::string postprocess_prepend_start(const std::string& output,
                                             const std::string& doc_start) {
    if (output.size() >= doc_start.size() &&
        std::string_view(output).substr(0, doc_start.size()) == doc_start)
        return output;
    return doc_start + output;
}

}  // namespace pergen
