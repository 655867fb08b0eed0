#include "znwrap/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace znwrap {

std::string format_double(double v) {
    if (v == 0) v = 0;  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

void write_json_string(const std::string& s, std::ostream& out) {
    out << '"';
    for (char c : s) {
        switch (c) {
            case '"': out << "\\\""; break;
            case '\\': out << "\\\\"; break;
            case '\n': out << "\\n"; break;
            case '\r': out << "\\r"; break;
            case '\t': out << "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out << buf;
                } else {
                    out << c;
                }
        }
    }
    out << '"';
}

void write_json_value(const ReportValue& v, std::ostream& out) {
    if (const bool* b = std::get_if<bool>(&v)) {
        out << (*b ? "true" : "false");
    } else if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) {
        out << *i;
    } else if (const double* d = std::get_if<double>(&v)) {
        if (std::isfinite(*d)) out << format_double(*d);
        else out << "null";
    } else if (const std::string* s = std::get_if<std::string>(&v)) {
        write_json_string(*s, out);
    } else if (const auto* xs = std::get_if<std::vector<std::int64_t>>(&v)) {
        out << '[';
        for (std::size_t i = 0; i < xs->size(); ++i) {
            if (i) out << ',';
            out << (*xs)[i];
        }
        out << ']';
    }
}

void write_json_map(const std::map<std::string, ReportValue>& m, std::ostream& out) {
    out << '{';
    bool first = true;
    for (const auto& [k, v] : m) {  // std::map iterates in sorted key order
        if (!first) out << ',';
        first = false;
        write_json_string(k, out);
        out << ':';
        write_json_value(v, out);
    }
    out << '}';
}

std::string render_scalar(const ReportValue& v) {
    if (const bool* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const double* d = std::get_if<double>(&v)) return format_double(*d);
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* xs = std::get_if<std::vector<std::int64_t>>(&v)) {
        std::string out;
        for (std::size_t i = 0; i < xs->size(); ++i) {
            if (i) out += ' ';
            out += std::to_string((*xs)[i]);
        }
        return out;
    }
    return {};
}

}  // namespace

void emit_report(const ExperimentReport& rep, ReportFormat fmt, std::ostream& out) {
    if (fmt == ReportFormat::json) {
        out << "{\"command\":";
        write_json_string(rep.command, out);
        out << ",\"params\":";
        write_json_map(rep.params, out);
        out << ",\"results\":";
        write_json_map(rep.results, out);
        out << ",\"runtime_ms\":" << rep.runtime_ms;
        out << ",\"schema_version\":1";
        out << ",\"seed\":" << rep.seed;
        if (rep.table) {
            out << ",\"table\":{\"columns\":[";
            for (std::size_t i = 0; i < rep.table->columns.size(); ++i) {
                if (i) out << ',';
                write_json_string(rep.table->columns[i], out);
            }
            out << "],\"rows\":[";
            for (std::size_t i = 0; i < rep.table->rows.size(); ++i) {
                if (i) out << ',';
                out << '[';
                for (std::size_t j = 0; j < rep.table->rows[i].size(); ++j) {
                    if (j) out << ',';
                    const double d = rep.table->rows[i][j];
                    if (std::isfinite(d)) out << format_double(d);
                    else out << "null";
                }
                out << ']';
            }
            out << "]}";
        }
        out << "}\n";
        return;
    }

    // CSV: the table when there is one, otherwise key,value rows of results.
    if (rep.table) {
        for (std::size_t i = 0; i < rep.table->columns.size(); ++i) {
            if (i) out << ',';
            out << rep.table->columns[i];
        }
        out << '\n';
        for (const auto& row : rep.table->rows) {
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (j) out << ',';
                out << format_double(row[j]);
            }
            out << '\n';
        }
        return;
    }
    out << "key,value\n";
    for (const auto& [k, v] : rep.results) {
        out << k << ',' << render_scalar(v) << '\n';
    }
}

std::string report_to_string(const ExperimentReport& rep, ReportFormat fmt) {
    std::ostringstream oss;
    emit_report(rep, fmt, oss);
    return oss.str();
}

}  // namespace znwrap
