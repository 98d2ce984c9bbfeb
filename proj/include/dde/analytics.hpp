#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "dde/labeler.hpp"
#include "dde/trace.hpp"

namespace dde {

constexpr std::int64_t kTurnJoinMs = 400;        // IPUs closer than this share a turn
constexpr std::int64_t kPauseMinMs = 200;        // within-turn silences longer than this are pauses
constexpr std::int64_t kBackchannelMaxMs = 1000; // backchannel IPUs are shorter than this

struct TurnStructure {
    std::vector<Interval> ipus;
    std::vector<Interval> turns;            // formed from non-backchannel IPUs
    std::vector<Interval> pauses;           // within-turn silences > 200ms
    std::vector<Interval> backchannel_ipus; // excluded from this speaker's turns
    std::int64_t within_turn_silence_ms = 0;
};

struct Gap {
    Interval interval;
    Speaker from = Speaker::A;
    Speaker to = Speaker::B;

    std::int64_t ms() const { return interval.length(); }
    bool operator==(const Gap&) const = default;
};

struct Backchannel {
    Speaker speaker = Speaker::A;
    Interval interval;
    bool operator==(const Backchannel&) const = default;
};

struct CrossChannelEvents {
    std::vector<Interval> overlaps;
    std::vector<Backchannel> backchannels;
    std::vector<Gap> gaps;
};

struct NaturalnessRecord {
    std::optional<double> pstd_hz;
    std::optional<double> mean_f0_hz;
    std::optional<double> estd;
    std::optional<double> wpm;
    std::optional<double> fwpm;
    std::optional<double> rpm;
    std::optional<double> lpm;
    std::optional<double> bpm;
    std::optional<double> spm_s;        // within-turn silence seconds per minute
    std::optional<double> mean_pause_s; // mean length of pauses
};

struct EventTotals {
    std::size_t overlaps = 0;
    std::size_t backchannels = 0;
    std::size_t pauses = 0;
    std::size_t gaps = 0;
};

struct ConversationReport {
    std::int64_t duration_ms = 0;
    double overlaps_per_min = 0;
    double backchannels_per_min = 0;
    double pauses_per_min = 0;
    std::optional<double> avg_gap_ms; // absent when there are no gaps
    EventTotals counts;
    std::optional<NaturalnessRecord> naturalness;
};

struct ClassStats {
    std::size_t support = 0;
    std::size_t predicted = 0;
    std::size_t true_positive = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

struct ClassReport {
    std::array<ClassStats, 4> per_class; // indexed by action_index()
    std::array<std::array<std::size_t, 4>, 4> confusion{}; // [gold][predicted]
    std::size_t total = 0;
    double accuracy = 0;
    double micro_precision = 0;

    const ClassStats& operator[](Action a) const { return per_class[action_index(a)]; }
};

using StereoPcm = std::array<std::vector<std::int16_t>, 2>;

enum class NaturalnessMetric { pstd, estd, wpm, fwpm, rpm, lpm, bpm, spm };

TurnStructure turn_structure(const ConversationTrace& trace, Speaker speaker);
CrossChannelEvents cross_channel_events(const ConversationTrace& trace);

// Rates are occurrences per minute of conversation.
ConversationReport conversation_report(const ConversationTrace& trace, const StereoPcm* audio = nullptr);

// Harmonic mean of precision and recall, 0 when both are 0.
double f1_score(double precision, double recall);
ClassReport classification_report(std::span<const Action> gold, std::span<const Action> predicted);

// Fills every metric whose inputs are present. Metrics listed in `required`
// throw MissingInputError when their inputs are absent.
NaturalnessRecord naturalness_report(const ConversationTrace& trace, const StereoPcm* audio = nullptr,
                                     std::span<const NaturalnessMetric> required = {});

// Autocorrelation F0 estimate for the 20ms frame at samples[0..320), searching
// 60-400 Hz. Needs 320 + 267 samples; returns nullopt when unvoiced.
std::optional<double> estimate_f0(std::span<const std::int16_t> samples);

} // namespace dde
