#pragma once

// JSON Lines reading/writing.  Every intermediate artifact is JSONL so
// pipeline stages can be rerun independently and diffed.

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fileloc/errors.hpp"

namespace fileloc::jsonl {

using json = nlohmann::json;

// Calls fn(line_number, parsed_object) for every non-empty line; line
// numbers are 1-based.  Parse failures surface as SchemaError.
inline void read_file(const std::filesystem::path& path,
                      const std::function<void(std::size_t, const json&)>& fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded())
            throw SchemaError(line_no, "invalid JSON in " + path.filename().string());
        fn(line_no, obj);
    }
}

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path) {
        if (!out_) throw IoError("cannot write " + path.string());
    }
    void write(const json& obj) { out_ << obj.dump() << '\n'; }

private:
    std::ofstream out_;
};

// Rejects unexpected keys and reports the offending line; missing required
// keys are reported the same way.
inline void require_keys(std::size_t line_no, const json& obj,
                         const std::vector<std::string>& required,
                         const std::vector<std::string>& optional = {}) {
    if (!obj.is_object()) throw SchemaError(line_no, "expected a JSON object");
    for (const auto& key : required)
        if (!obj.contains(key)) throw SchemaError(line_no, "missing field '" + key + "'");
    for (const auto& [key, value] : obj.items()) {
        bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                     std::find(optional.begin(), optional.end(), key) != optional.end();
        if (!known) throw SchemaError(line_no, "unknown field '" + key + "'");
    }
}

}  // namespace fileloc::jsonl
