#include "dde/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dde/error.hpp"

namespace dde {

using ojson = nlohmann::ordered_json;

namespace {

template <class T>
void put_optional(ojson& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

std::optional<double> get_optional(const ojson& j, const char* key) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) return it->get<double>();
    return std::nullopt;
}

std::string pad(const std::string& s, std::size_t width, bool left_align) {
    if (s.size() >= width) return s;
    return left_align ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

} // namespace

ojson report_to_json(const ConversationReport& r) {
    ojson j;
    j["duration_ms"] = r.duration_ms;
    j["overlaps_per_min"] = r.overlaps_per_min;
    j["backchannels_per_min"] = r.backchannels_per_min;
    j["pauses_per_min"] = r.pauses_per_min;
    j["avg_gap_ms"] = r.avg_gap_ms ? ojson(*r.avg_gap_ms) : ojson(nullptr);
    j["counts"] = {{"overlaps", r.counts.overlaps},
                   {"backchannels", r.counts.backchannels},
                   {"pauses", r.counts.pauses},
                   {"gaps", r.counts.gaps}};
    if (r.naturalness) {
        const auto& n = *r.naturalness;
        ojson nj = ojson::object();
        put_optional(nj, "pstd_hz", n.pstd_hz);
        put_optional(nj, "mean_f0_hz", n.mean_f0_hz);
        put_optional(nj, "estd", n.estd);
        put_optional(nj, "wpm", n.wpm);
        put_optional(nj, "fwpm", n.fwpm);
        put_optional(nj, "rpm", n.rpm);
        put_optional(nj, "lpm", n.lpm);
        put_optional(nj, "bpm", n.bpm);
        put_optional(nj, "spm_s", n.spm_s);
        put_optional(nj, "mean_pause_s", n.mean_pause_s);
        j["naturalness"] = std::move(nj);
    }
    return j;
}

ConversationReport report_from_json(const ojson& j) {
    try {
        ConversationReport r;
        r.duration_ms = j.value("duration_ms", std::int64_t{0});
        r.overlaps_per_min = j.at("overlaps_per_min").get<double>();
        r.backchannels_per_min = j.at("backchannels_per_min").get<double>();
        r.pauses_per_min = j.at("pauses_per_min").get<double>();
        r.avg_gap_ms = get_optional(j, "avg_gap_ms");
        if (auto it = j.find("counts"); it != j.end()) {
            r.counts.overlaps = it->value("overlaps", std::size_t{0});
            r.counts.backchannels = it->value("backchannels", std::size_t{0});
            r.counts.pauses = it->value("pauses", std::size_t{0});
            r.counts.gaps = it->value("gaps", std::size_t{0});
        }
        if (auto it = j.find("naturalness"); it != j.end() && it->is_object()) {
            NaturalnessRecord n;
            n.pstd_hz = get_optional(*it, "pstd_hz");
            n.mean_f0_hz = get_optional(*it, "mean_f0_hz");
            n.estd = get_optional(*it, "estd");
            n.wpm = get_optional(*it, "wpm");
            n.fwpm = get_optional(*it, "fwpm");
            n.rpm = get_optional(*it, "rpm");
            n.lpm = get_optional(*it, "lpm");
            n.bpm = get_optional(*it, "bpm");
            n.spm_s = get_optional(*it, "spm_s");
            n.mean_pause_s = get_optional(*it, "mean_pause_s");
            r.naturalness = n;
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed report: ") + e.what());
    }
}

ojson class_report_to_json(const ClassReport& r) {
    ojson j;
    ojson classes = ojson::object();
    for (Action a : kAllActions) {
        const auto& s = r[a];
        classes[std::string(action_name(a))] = {{"support", s.support},
                                                {"precision", s.precision},
                                                {"recall", s.recall},
                                                {"f1", s.f1}};
    }
    j["classes"] = std::move(classes);
    j["accuracy"] = r.accuracy;
    j["total"] = r.total;
    ojson confusion = ojson::array();
    for (const auto& row : r.confusion) confusion.push_back(row);
    j["confusion"] = std::move(confusion);
    return j;
}

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    std::string s = buf;
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

std::string format_report_table(const std::vector<ReportRow>& rows) {
    const std::vector<std::string> header = {"Conversation", "Overlaps", "Backchannels", "Pauses", "Avg gap (ms)"};
    std::vector<std::vector<std::string>> cells = {header};
    for (const auto& row : rows) {
        const auto& r = row.report;
        cells.push_back({row.name, format_number(r.overlaps_per_min), format_number(r.backchannels_per_min),
                         format_number(r.pauses_per_min), r.avg_gap_ms ? format_number(*r.avg_gap_ms) : "-"});
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : cells)
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());

    std::ostringstream out;
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c) out << "  ";
            out << pad(line[c], width[c], c == 0);
        }
        out << '\n';
    }
    return out.str();
}

ConversationReport mean_report(const std::vector<ReportRow>& rows) {
    ConversationReport m;
    if (rows.empty()) return m;
    double gap_sum = 0;
    std::size_t gap_n = 0;
    for (const auto& row : rows) {
        m.duration_ms += row.report.duration_ms;
        m.overlaps_per_min += row.report.overlaps_per_min;
        m.backchannels_per_min += row.report.backchannels_per_min;
        m.pauses_per_min += row.report.pauses_per_min;
        m.counts.overlaps += row.report.counts.overlaps;
        m.counts.backchannels += row.report.counts.backchannels;
        m.counts.pauses += row.report.counts.pauses;
        m.counts.gaps += row.report.counts.gaps;
        if (row.report.avg_gap_ms) {
            gap_sum += *row.report.avg_gap_ms;
            ++gap_n;
        }
    }
    const auto n = static_cast<double>(rows.size());
    m.overlaps_per_min /= n;
    m.backchannels_per_min /= n;
    m.pauses_per_min /= n;
    if (gap_n) m.avg_gap_ms = gap_sum / static_cast<double>(gap_n);
    return m;
}

std::string format_class_report(const ClassReport& r) {
    std::ostringstream out;
    out << pad("Next action", 12, true) << pad("Support", 9, false) << pad("Precision", 11, false)
        << pad("Recall", 8, false) << pad("F1", 7, false) << '\n';
    char buf[32];
    for (Action a : kAllActions) {
        const auto& s = r[a];
        out << pad(std::string(action_name(a)), 12, true) << pad(std::to_string(s.support), 9, false);
        const std::pair<double, std::size_t> cols[] = {{s.precision, 11}, {s.recall, 8}, {s.f1, 7}};
        for (const auto& [v, w] : cols) {
            std::snprintf(buf, sizeof buf, "%.2f", v);
            out << pad(buf, w, false);
        }
        out << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.4f", r.accuracy);
    out << "accuracy " << buf << " over " << r.total << " labels\n";
    return out.str();
}

} // namespace dde
