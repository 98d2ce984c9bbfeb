#include "dde/trace_io.hpp"

#include <fstream>
#include <sstream>

#include "dde/error.hpp"

namespace dde {

namespace {

json segment_to_json(const SpeechSegment& s) {
    json j;
    j["start_ms"] = s.start_ms;
    j["end_ms"] = s.end_ms;
    if (s.units) j["units"] = *s.units;
    if (s.words) j["words"] = *s.words;
    if (s.events) {
        j["events"] = {{"fillers", s.events->fillers},
                       {"repetitions", s.events->repetitions},
                       {"laughs", s.events->laughs},
                       {"breaths", s.events->breaths}};
    }
    return j;
}

SpeechSegment segment_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("segment must be an object");
    SpeechSegment s;
    s.start_ms = j.at("start_ms").get<std::int64_t>();
    s.end_ms = j.at("end_ms").get<std::int64_t>();
    if (auto it = j.find("units"); it != j.end() && !it->is_null()) s.units = it->get<std::vector<int>>();
    if (auto it = j.find("words"); it != j.end() && !it->is_null()) s.words = it->get<int>();
    if (auto it = j.find("events"); it != j.end() && !it->is_null()) {
        EventCounts e;
        e.fillers = it->value("fillers", 0);
        e.repetitions = it->value("repetitions", 0);
        e.laughs = it->value("laughs", 0);
        e.breaths = it->value("breaths", 0);
        s.events = e;
    }
    return s;
}

} // namespace

json trace_to_json(const ConversationTrace& trace) {
    json j;
    j["duration_ms"] = trace.duration_ms;
    json channels = json::array();
    for (const auto& ch : trace.channels) {
        json segs = json::array();
        for (const auto& s : ch) segs.push_back(segment_to_json(s));
        channels.push_back(std::move(segs));
    }
    j["channels"] = std::move(channels);
    return j;
}

ConversationTrace trace_from_json(const json& j) {
    try {
        if (!j.is_object()) throw ValidationError("trace must be a JSON object");
        const auto& channels = j.at("channels");
        if (!channels.is_array() || channels.size() != 2)
            throw ValidationError("trace must have exactly 2 channels");
        std::vector<SpeakerSegment> events;
        for (int c = 0; c < 2; ++c)
            for (const auto& sj : channels[c]) events.emplace_back(static_cast<Speaker>(c), segment_from_json(sj));
        return build_trace(std::move(events), j.at("duration_ms").get<std::int64_t>());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed trace: ") + e.what());
    }
}

std::string serialize_trace(const ConversationTrace& trace) { return trace_to_json(trace).dump(); }

ConversationTrace parse_trace(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed trace JSON: ") + e.what());
    }
    return trace_from_json(j);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
    if (!out) throw ValidationError("write failed for " + path.string());
}

std::vector<ConversationTrace> read_traces(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::vector<ConversationTrace> out;
    if (path.extension() == ".jsonl") {
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            out.push_back(parse_trace(line));
        }
    } else {
        out.push_back(parse_trace(text));
    }
    return out;
}

ConversationTrace read_trace(const std::filesystem::path& path) {
    auto traces = read_traces(path);
    if (traces.size() != 1)
        throw ValidationError(path.string() + " holds " + std::to_string(traces.size()) +
                              " conversations, expected 1");
    return std::move(traces.front());
}

void write_trace(const std::filesystem::path& path, const ConversationTrace& trace) {
    write_text_file(path, serialize_trace(trace) + "\n");
}

Speaker parse_speaker(const std::string& name) {
    if (name == "A" || name == "a" || name == "0") return Speaker::A;
    if (name == "B" || name == "b" || name == "1") return Speaker::B;
    throw ValidationError("unknown speaker '" + name + "'");
}

} // namespace dde
