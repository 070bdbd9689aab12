#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace pdren {

using Json = nlohmann::ordered_json;

// A reference value with its accepted interval [lo, hi].
struct ConstantInterval {
    const char* name;
    double lo;
    double hi;
    const char* meaning;
};

const std::vector<ConstantInterval>& constants_table();
const ConstantInterval& constant(const std::string& name);

struct ConstantCheck {
    std::string name;
    double value = 0.0;
    double lo = 0.0, hi = 0.0;
    bool pass = false;
};

struct Report {
    std::string command;
    Json inputs = Json::object();
    Json outputs = Json::object();
    std::vector<ConstantCheck> checks;

    // Compares value against the named table entry and records the result.
    bool check(const std::string& name, double value);
    bool all_pass() const;
    Json to_json(bool with_timestamp = true) const;
};

// FNV-1a of the file contents, as 16 hex digits.
std::string file_digest(const std::string& path);

// Writes to a temporary sibling and renames, so readers never see a
// partially written file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string format_csv_number(double v);
std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

}  // namespace pdren
