#pragma once

#include <levylat/rational.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace levylat {

/// One result cell: exact rationals stay exact in JSON ("17/8"), everything
/// else is decimal with 12 significant digits.
using ResultValue = std::variant<std::string, bool, std::int64_t, double, Rat>;

struct ResultRecord {
    std::vector<std::pair<std::string, ResultValue>> fields;  // fixed order
    void add(std::string key, ResultValue v) { fields.emplace_back(std::move(key), std::move(v)); }
};

std::string format_double(double v);              // 12 significant digits
std::string json_scalar(const ResultValue& v);    // rationals as quoted "p/q"
std::string csv_scalar(const ResultValue& v);     // rationals as decimal

/// One JSON object per line, insertion order preserved.
std::string to_json_lines(const std::vector<ResultRecord>& records);
/// Fixed column order from the given header; missing cells are empty.
std::string to_csv(const std::vector<std::string>& columns,
                   const std::vector<ResultRecord>& records);

struct RunManifest {
    std::string tool_version;
    std::string command;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string config_echo;  // canonical config serialization
};

std::uint64_t fnv1a_hash(const std::string& data);
std::string manifest_json(const RunManifest& m);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace levylat
