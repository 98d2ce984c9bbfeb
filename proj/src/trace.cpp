#include "dde/trace.hpp"

#include <algorithm>
#include <string>

#include "dde/error.hpp"

namespace dde {

namespace {

std::string describe(const SpeechSegment& s) {
    return "[" + std::to_string(s.start_ms) + "," + std::to_string(s.end_ms) + ")";
}

void check_units(const SpeechSegment& s) {
    if (!s.units) return;
    if (s.start_ms % kFrameMs != 0 || s.end_ms % kFrameMs != 0)
        throw ValidationError("segment " + describe(s) + " carries units but is not 20ms-aligned");
    if (static_cast<std::int64_t>(s.units->size()) * kFrameMs != s.length())
        throw ValidationError("segment " + describe(s) + " has " + std::to_string(s.units->size()) +
                              " units, expected one per 20ms frame");
    for (int u : *s.units)
        if (u < 0) throw ValidationError("segment " + describe(s) + " has a negative unit id");
}

// Union of two segments where b starts no later than a ends.
SpeechSegment merge(SpeechSegment a, const SpeechSegment& b) {
    if (b.end_ms > a.end_ms) {
        const std::int64_t skip = a.end_ms - b.start_ms;
        if (a.units && b.units && skip % kFrameMs == 0) {
            a.units->insert(a.units->end(), b.units->begin() + skip / kFrameMs, b.units->end());
        } else {
            a.units.reset();
        }
        a.end_ms = b.end_ms;
    }
    if (a.words && b.words) *a.words += *b.words;
    else a.words.reset();
    if (a.events && b.events) *a.events += *b.events;
    else a.events.reset();
    return a;
}

} // namespace

ConversationTrace build_trace(std::vector<SpeakerSegment> events, std::int64_t duration_ms) {
    if (duration_ms < 0) throw ValidationError("negative trace duration");
    ConversationTrace trace;
    trace.duration_ms = duration_ms;
    for (auto& [speaker, seg] : events) {
        if (speaker != Speaker::A && speaker != Speaker::B)
            throw ValidationError("unknown speaker");
        if (seg.start_ms < 0) throw ValidationError("segment " + describe(seg) + " starts before 0");
        if (seg.end_ms <= seg.start_ms) throw ValidationError("segment " + describe(seg) + " is empty");
        if (seg.end_ms > duration_ms)
            throw ValidationError("segment " + describe(seg) + " extends past duration " +
                                  std::to_string(duration_ms));
        check_units(seg);
        trace.channels[index(speaker)].push_back(std::move(seg));
    }
    for (auto& ch : trace.channels) {
        std::stable_sort(ch.begin(), ch.end(), [](const SpeechSegment& x, const SpeechSegment& y) {
            return x.start_ms < y.start_ms;
        });
        Channel merged;
        for (auto& seg : ch) {
            if (!merged.empty() && seg.start_ms <= merged.back().end_ms)
                merged.back() = merge(std::move(merged.back()), seg);
            else
                merged.push_back(std::move(seg));
        }
        ch = std::move(merged);
    }
    return trace;
}

void validate(const ConversationTrace& trace) {
    if (trace.duration_ms < 0) throw ValidationError("negative trace duration");
    for (const auto& ch : trace.channels) {
        for (std::size_t i = 0; i < ch.size(); ++i) {
            const auto& s = ch[i];
            if (s.start_ms < 0 || s.end_ms <= s.start_ms)
                throw ValidationError("invalid segment " + describe(s));
            if (s.end_ms > trace.duration_ms)
                throw ValidationError("segment " + describe(s) + " extends past duration");
            if (i > 0 && s.start_ms <= ch[i - 1].end_ms)
                throw ValidationError("segments " + describe(ch[i - 1]) + " and " + describe(s) +
                                      " are unsorted, overlapping or touching");
            check_units(s);
        }
    }
}

FrameGrid frame_grid(const ConversationTrace& trace) {
    const auto n = static_cast<std::size_t>(trace.duration_ms / kFrameMs);
    FrameGrid grid;
    for (int c = 0; c < 2; ++c) {
        std::vector<std::int64_t> cover(n, 0);
        for (const auto& s : trace.channels[c]) {
            const auto first = static_cast<std::size_t>(s.start_ms / kFrameMs);
            for (std::size_t f = first; f < n && static_cast<std::int64_t>(f) * kFrameMs < s.end_ms; ++f) {
                const std::int64_t lo = std::max<std::int64_t>(s.start_ms, f * kFrameMs);
                const std::int64_t hi = std::min<std::int64_t>(s.end_ms, (f + 1) * kFrameMs);
                cover[f] += hi - lo;
            }
        }
        grid.frames[c].resize(n);
        for (std::size_t f = 0; f < n; ++f) grid.frames[c][f] = cover[f] * 2 >= kFrameMs;
    }
    return grid;
}

ConversationTrace window(const ConversationTrace& trace, std::int64_t end_ms, std::int64_t width_ms) {
    if (end_ms <= 0 || end_ms > trace.duration_ms)
        throw ValidationError("window end " + std::to_string(end_ms) + " outside (0, " +
                              std::to_string(trace.duration_ms) + "]");
    if (width_ms <= 0) throw ValidationError("window width must be positive");
    const std::int64_t left = std::max<std::int64_t>(0, end_ms - width_ms);
    ConversationTrace out;
    out.duration_ms = end_ms - left;
    for (int c = 0; c < 2; ++c) {
        const auto& ch = trace.channels[c];
        // first segment that ends after the left edge
        auto it = std::upper_bound(ch.begin(), ch.end(), left,
                                   [](std::int64_t t, const SpeechSegment& s) { return t < s.end_ms; });
        for (; it != ch.end() && it->start_ms < end_ms; ++it) {
            const std::int64_t lo = std::max(it->start_ms, left);
            const std::int64_t hi = std::min(it->end_ms, end_ms);
            SpeechSegment seg;
            seg.start_ms = lo - left;
            seg.end_ms = hi - left;
            const bool whole = lo == it->start_ms && hi == it->end_ms;
            if (whole) {
                seg.units = it->units;
                seg.words = it->words;
                seg.events = it->events;
            } else if (it->units && (lo - it->start_ms) % kFrameMs == 0 && (hi - lo) % kFrameMs == 0 &&
                       seg.start_ms % kFrameMs == 0) {
                const auto from = it->units->begin() + (lo - it->start_ms) / kFrameMs;
                seg.units.emplace(from, from + (hi - lo) / kFrameMs);
            }
            out.channels[c].push_back(std::move(seg));
        }
    }
    return out;
}

std::int64_t total_speech_ms(const ConversationTrace& trace, Speaker s) {
    std::int64_t total = 0;
    for (const auto& seg : trace.channel(s)) total += seg.length();
    return total;
}

} // namespace dde
