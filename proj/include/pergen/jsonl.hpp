#pragma once

#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace pergen {

using json = nlohmann::json;

/// Calls `fn(line_number, parsed)` for every non-empty line. Returns the
/// number of malformed lines skipped (fn is not called for those).
inline std::size_t for_each_jsonl(const std::string& path,
                                  const std::function<void(std::size_t, const json&)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string line;
    std::size_t line_no = 0;
    std::size_t malformed = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded()) {
            ++malformed;
            continue;
        }
        fn(line_no, row);
    }
    return malformed;
}

class JsonlWriter {
public:
    explicit JsonlWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open file for writing: " + path);
    }

    void write(const json& row) {
        out_ << row.dump() << '\n';
        if (!out_) throw std::runtime_error("write failed");
    }

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace pergen
