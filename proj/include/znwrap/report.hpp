#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace znwrap {

using ReportValue =
    std::variant<bool, std::int64_t, double, std::string, std::vector<std::int64_t>>;

/// Rectangular sweep data; the CSV rendering of a report.
struct ReportTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// One experiment outcome.  Every asserted inequality stores both sides in
/// `results` so reports stay auditable without rerunning.
struct ExperimentReport {
    std::string command;
    std::map<std::string, ReportValue> params;
    std::map<std::string, ReportValue> results;
    std::uint64_t seed = 0;
    std::int64_t runtime_ms = 0;
    std::optional<ReportTable> table;
};

enum class ReportFormat { json, csv };

/// %.12g — the one true float rendering for reports.
std::string format_double(double v);

/// Canonical emission: JSON with lexicographically sorted keys, doubles at
/// 12 significant digits, newline-terminated; or CSV of the table.
/// Identical reports produce identical bytes.
void emit_report(const ExperimentReport& rep, ReportFormat fmt, std::ostream& out);
std::string report_to_string(const ExperimentReport& rep, ReportFormat fmt);

}  // namespace znwrap
