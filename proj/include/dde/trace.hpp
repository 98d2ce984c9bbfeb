#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dde {

constexpr std::int64_t kFrameMs = 20;
constexpr std::int64_t kTickFrames = 8;
constexpr std::int64_t kTickMs = kFrameMs * kTickFrames; // 160
constexpr std::int64_t kDefaultWindowMs = 20000;
constexpr int kSampleRate = 16000;
constexpr std::size_t kSamplesPerFrame = kSampleRate * kFrameMs / 1000; // 320

enum class Speaker : int { A = 0, B = 1 };

inline constexpr Speaker other(Speaker s) { return s == Speaker::A ? Speaker::B : Speaker::A; }
inline constexpr int index(Speaker s) { return static_cast<int>(s); }
inline constexpr char speaker_name(Speaker s) { return s == Speaker::A ? 'A' : 'B'; }

struct Interval {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;

    std::int64_t length() const { return end_ms - start_ms; }
    bool operator==(const Interval&) const = default;
};

struct EventCounts {
    int fillers = 0;
    int repetitions = 0;
    int laughs = 0;
    int breaths = 0;

    EventCounts& operator+=(const EventCounts& o) {
        fillers += o.fillers;
        repetitions += o.repetitions;
        laughs += o.laughs;
        breaths += o.breaths;
        return *this;
    }
    bool operator==(const EventCounts&) const = default;
};

// One stretch of continuous speech on a channel, [start_ms, end_ms).
// When units are present there is one raw unit per 20ms frame.
struct SpeechSegment {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    std::optional<std::vector<int>> units;
    std::optional<int> words;
    std::optional<EventCounts> events;

    std::int64_t length() const { return end_ms - start_ms; }
    Interval interval() const { return {start_ms, end_ms}; }
    bool operator==(const SpeechSegment&) const = default;
};

using Channel = std::vector<SpeechSegment>;

// Two time-aligned channels. Within a channel segments are sorted, disjoint
// and separated by at least 1ms; all segments end at or before duration_ms.
struct ConversationTrace {
    std::array<Channel, 2> channels;
    std::int64_t duration_ms = 0;

    const Channel& channel(Speaker s) const { return channels[index(s)]; }
    bool operator==(const ConversationTrace&) const = default;
};

struct FrameGrid {
    static constexpr std::int64_t frame_ms = kFrameMs;
    static constexpr std::int64_t tick_frames = kTickFrames;
    std::array<std::vector<bool>, 2> frames;

    std::size_t size() const { return frames[0].size(); }
    bool active(Speaker s, std::size_t f) const { return frames[index(s)][f]; }
};

struct VadConfig {
    std::int64_t frame_ms = kFrameMs;
    double energy_threshold_db = 12.0;
    std::int64_t min_speech_ms = 100;
    std::int64_t min_gap_ms = 100;
};

using SpeakerSegment = std::pair<Speaker, SpeechSegment>;

// Sorts and validates events; overlapping or touching same-channel segments
// are merged. Throws ValidationError on empty or out-of-range segments.
ConversationTrace build_trace(std::vector<SpeakerSegment> events, std::int64_t duration_ms);

// Checks all trace invariants, throwing ValidationError on the first failure.
void validate(const ConversationTrace& trace);

// Frame f is active iff [20f, 20f+20) is covered by at least 10ms of speech.
FrameGrid frame_grid(const ConversationTrace& trace);

// Clips the trace to [max(0, end_ms - width_ms), end_ms) and re-bases to 0.
ConversationTrace window(const ConversationTrace& trace, std::int64_t end_ms,
                         std::int64_t width_ms = kDefaultWindowMs);

std::int64_t total_speech_ms(const ConversationTrace& trace, Speaker s);

// Per-channel energy VAD over 20ms frames of 16 kHz PCM16.
ConversationTrace vad_from_samples(const std::array<std::vector<std::int16_t>, 2>& pcm,
                                   const VadConfig& cfg = {});

// Frame RMS normalised to full scale, one value per complete 20ms frame.
std::vector<double> frame_rms(std::span<const std::int16_t> samples);

} // namespace dde
