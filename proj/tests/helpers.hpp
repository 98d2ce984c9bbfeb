#pragma once

#include <initializer_list>
#include <tuple>

#include "dde/trace.hpp"

namespace testing {

struct Seg {
    dde::Speaker speaker;
    std::int64_t start_ms, end_ms;
};

inline dde::ConversationTrace trace_of(std::initializer_list<Seg> segs, std::int64_t duration_ms) {
    std::vector<dde::SpeakerSegment> events;
    for (const auto& s : segs) {
        dde::SpeechSegment seg;
        seg.start_ms = s.start_ms;
        seg.end_ms = s.end_ms;
        events.emplace_back(s.speaker, seg);
    }
    return dde::build_trace(std::move(events), duration_ms);
}

inline constexpr dde::Speaker A = dde::Speaker::A;
inline constexpr dde::Speaker B = dde::Speaker::B;

} // namespace testing
