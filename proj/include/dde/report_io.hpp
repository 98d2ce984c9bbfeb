#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dde/analytics.hpp"

namespace dde {

nlohmann::ordered_json report_to_json(const ConversationReport& report);
ConversationReport report_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json class_report_to_json(const ClassReport& report);

// Up to two decimals, trailing zeros trimmed: 800 -> "800", 5.70 -> "5.7".
std::string format_number(double x);

struct ReportRow {
    std::string name;
    ConversationReport report;
};

// Aligned columns: overlaps, backchannels and pauses per minute, average gap.
std::string format_report_table(const std::vector<ReportRow>& rows);

// Arithmetic mean of per-trace rates; the gap column averages traces that have gaps.
ConversationReport mean_report(const std::vector<ReportRow>& rows);

std::string format_class_report(const ClassReport& report);

} // namespace dde
