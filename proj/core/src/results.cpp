#include <levylat/results.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace levylat {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string json_scalar(const ResultValue& v) {
    if (std::holds_alternative<std::string>(v)) return "\"" + json_escape(std::get<std::string>(v)) + "\"";
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
    if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
    if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
    return "\"" + rat_string(std::get<Rat>(v)) + "\"";
}

std::string csv_scalar(const ResultValue& v) {
    if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
    if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
    if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
    return format_double(to_double(std::get<Rat>(v)));
}

std::string to_json_lines(const std::vector<ResultRecord>& records) {
    std::ostringstream os;
    for (const auto& rec : records) {
        os << "{";
        bool first = true;
        for (const auto& [k, v] : rec.fields) {
            if (!first) os << ",";
            os << "\"" << json_escape(k) << "\":" << json_scalar(v);
            first = false;
        }
        os << "}\n";
    }
    return os.str();
}

std::string to_csv(const std::vector<std::string>& columns,
                   const std::vector<ResultRecord>& records) {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) os << ",";
        os << columns[i];
    }
    os << "\n";
    for (const auto& rec : records) {
        std::map<std::string, const ResultValue*> lookup;
        for (const auto& [k, v] : rec.fields) lookup[k] = &v;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) os << ",";
            auto it = lookup.find(columns[i]);
            if (it != lookup.end()) os << csv_scalar(*it->second);
        }
        os << "\n";
    }
    return os.str();
}

std::uint64_t fnv1a_hash(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string manifest_json(const RunManifest& m) {
    std::ostringstream os;
    os << "{\n"
       << "  \"tool_version\": \"" << json_escape(m.tool_version) << "\",\n"
       << "  \"command\": \"" << json_escape(m.command) << "\",\n"
       << "  \"config_hash\": \"" << std::hex << m.config_hash << std::dec << "\",\n"
       << "  \"seed\": " << m.seed << ",\n"
       << "  \"workers\": " << m.workers << ",\n"
       << "  \"config\": \"" << json_escape(m.config_echo) << "\"\n"
       << "}\n";
    return os.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace levylat
