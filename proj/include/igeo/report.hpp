#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "igeo/errors.hpp"

namespace igeo {

// A self-describing result of one experiment step.  Reports written
// from the same config, seed and experiment are byte-identical; the
// wall time is kept for logging only and never serialized.
struct report_record {
    std::string experiment;
    std::string type;
    int index = 0;
    nlohmann::json inputs;
    nlohmann::json results;
    std::map<std::string, bool> verdicts;
    std::map<std::string, double> tolerances;
    double wall_ms = 0.0;

    bool all_pass() const {
        for (const auto& [k, v] : verdicts)
            if (!v) return false;
        return true;
    }
};

enum class report_format { json, csv };

namespace report_detail {

inline std::string fmt_real(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

// nlohmann keeps object keys sorted, so a plain walk is deterministic.
inline void write_json(std::ostream& os, const nlohmann::json& j) {
    switch (j.type()) {
    case nlohmann::json::value_t::null: os << "null"; break;
    case nlohmann::json::value_t::boolean: os << (j.get<bool>() ? "true" : "false"); break;
    case nlohmann::json::value_t::number_integer: os << j.get<long long>(); break;
    case nlohmann::json::value_t::number_unsigned: os << j.get<unsigned long long>(); break;
    case nlohmann::json::value_t::number_float: os << fmt_real(j.get<double>()); break;
    case nlohmann::json::value_t::string: os << '"' << escape(j.get<std::string>()) << '"'; break;
    case nlohmann::json::value_t::array: {
        os << '[';
        bool first = true;
        for (const auto& x : j) {
            if (!first) os << ',';
            first = false;
            write_json(os, x);
        }
        os << ']';
        break;
    }
    case nlohmann::json::value_t::object: {
        os << '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ',';
            first = false;
            os << '"' << escape(it.key()) << "\":";
            write_json(os, it.value());
        }
        os << '}';
        break;
    }
    default: os << "null"; break;
    }
}

inline std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// one row per scalar; vectors get a row index, matrices row and column
inline void csv_value(std::ostream& os, const report_record& r, const std::string& key,
                      const nlohmann::json& v) {
    auto emit = [&](const std::string& row, const std::string& col, const std::string& val) {
        os << csv_cell(r.experiment) << ',' << r.index << ',' << csv_cell(key) << ',' << row
           << ',' << col << ',' << csv_cell(val) << '\n';
    };
    if (v.is_number_float()) {
        emit("", "", fmt_real(v.get<double>()));
    } else if (v.is_number_integer() || v.is_number_unsigned()) {
        emit("", "", v.dump());
    } else if (v.is_boolean()) {
        emit("", "", v.get<bool>() ? "1" : "0");
    } else if (v.is_string()) {
        emit("", "", v.get<std::string>());
    } else if (v.is_array()) {
        bool nested = !v.empty() && v[0].is_array();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (nested) {
                for (std::size_t k = 0; k < v[i].size(); ++k) {
                    const auto& x = v[i][k];
                    emit(std::to_string(i), std::to_string(k),
                         x.is_number_float() ? fmt_real(x.get<double>()) : x.dump());
                }
            } else {
                const auto& x = v[i];
                emit(std::to_string(i), "",
                     x.is_number_float() ? fmt_real(x.get<double>()) : x.dump());
            }
        }
    } else if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it) csv_value(os, r, key + "." + it.key(), it.value());
    }
}

} // namespace report_detail

inline void emit_report(const std::vector<report_record>& records, report_format format,
                        std::ostream& os) {
    using namespace report_detail;
    if (format == report_format::json) {
        os << "{\"records\":[";
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            if (i) os << ',';
            os << "{\"experiment\":\"" << escape(r.experiment) << "\",\"type\":\""
               << escape(r.type) << "\",\"index\":" << r.index << ",\"inputs\":";
            write_json(os, r.inputs);
            os << ",\"results\":";
            write_json(os, r.results);
            os << ",\"verdicts\":{";
            bool first = true;
            for (const auto& [k, v] : r.verdicts) {
                if (!first) os << ',';
                first = false;
                os << '"' << escape(k) << "\":" << (v ? "true" : "false");
            }
            os << "},\"tolerances\":{";
            first = true;
            for (const auto& [k, v] : r.tolerances) {
                if (!first) os << ',';
                first = false;
                os << '"' << escape(k) << "\":" << fmt_real(v);
            }
            os << "}}";
        }
        os << "]}\n";
        return;
    }
    os << "experiment,index,key,row,col,value\n";
    for (const auto& r : records) {
        for (auto it = r.results.begin(); it != r.results.end(); ++it)
            csv_value(os, r, it.key(), it.value());
        for (const auto& [k, v] : r.verdicts)
            csv_value(os, r, "verdict:" + k, nlohmann::json(v));
        for (const auto& [k, v] : r.tolerances)
            csv_value(os, r, "tol:" + k, nlohmann::json(v));
    }
}

inline void emit_report(const std::vector<report_record>& records, report_format format,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open report file '" + path + "' for writing");
    emit_report(records, format, out);
    if (!out) throw io_error("failed writing report file '" + path + "'");
}

} // namespace igeo
