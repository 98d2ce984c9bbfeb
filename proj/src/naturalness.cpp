#include <algorithm>
#include <cmath>

#include "dde/analytics.hpp"
#include "dde/error.hpp"

namespace dde {

namespace {

constexpr double kMinF0Hz = 60.0;
constexpr double kMaxF0Hz = 400.0;
constexpr double kVoicingThreshold = 0.5;
constexpr double kOctaveTolerance = 0.9;

const std::size_t kMinLag = static_cast<std::size_t>(std::floor(kSampleRate / kMaxF0Hz));
const std::size_t kMaxLag = static_cast<std::size_t>(std::ceil(kSampleRate / kMinF0Hz));

double population_stddev(const std::vector<double>& xs) {
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(xs.size()));
}

bool all_segments_have(const ConversationTrace& trace, bool (*has)(const SpeechSegment&)) {
    bool any = false;
    for (const auto& ch : trace.channels)
        for (const auto& s : ch) {
            if (!has(s)) return false;
            any = true;
        }
    return any;
}

bool is_required(std::span<const NaturalnessMetric> required, NaturalnessMetric m) {
    return std::find(required.begin(), required.end(), m) != required.end();
}

} // namespace

std::optional<double> estimate_f0(std::span<const std::int16_t> samples) {
    const std::size_t n = kSamplesPerFrame;
    if (samples.size() < n + kMaxLag + 1) return std::nullopt;

    std::vector<double> x(n + kMaxLag + 1);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = samples[i] / 32768.0;

    double e0 = 0;
    for (std::size_t i = 0; i < n; ++i) e0 += x[i] * x[i];
    if (e0 <= 0) return std::nullopt;

    // normalised autocorrelation over lags [kMinLag - 1, kMaxLag + 1] for interpolation headroom
    std::vector<double> r(kMaxLag + 2, 0.0);
    for (std::size_t lag = kMinLag - 1; lag <= kMaxLag + 1 && lag + n <= x.size(); ++lag) {
        double num = 0, el = 0;
        for (std::size_t i = 0; i < n; ++i) {
            num += x[i] * x[i + lag];
            el += x[i + lag] * x[i + lag];
        }
        r[lag] = el > 0 ? num / std::sqrt(e0 * el) : 0.0;
    }

    double best = 0;
    for (std::size_t lag = kMinLag; lag <= kMaxLag; ++lag) best = std::max(best, r[lag]);
    if (best < kVoicingThreshold) return std::nullopt;

    // first local peak close to the global maximum avoids sub-octave picks
    std::size_t pick = 0;
    for (std::size_t lag = kMinLag; lag <= kMaxLag; ++lag) {
        if (r[lag] >= kOctaveTolerance * best && r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1]) {
            pick = lag;
            break;
        }
    }
    if (pick == 0) return std::nullopt;

    double lag = static_cast<double>(pick);
    const double y0 = r[pick - 1], y1 = r[pick], y2 = r[pick + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom < 0) lag += 0.5 * (y0 - y2) / denom;
    return kSampleRate / lag;
}

NaturalnessRecord naturalness_report(const ConversationTrace& trace, const StereoPcm* audio,
                                     std::span<const NaturalnessMetric> required) {
    NaturalnessRecord rec;

    std::int64_t speech_ms = 0;
    for (Speaker s : {Speaker::A, Speaker::B}) speech_ms += total_speech_ms(trace, s);

    const bool have_words = speech_ms > 0 && all_segments_have(trace, [](const SpeechSegment& s) {
        return s.words.has_value();
    });
    const bool have_events = speech_ms > 0 && all_segments_have(trace, [](const SpeechSegment& s) {
        return s.events.has_value();
    });
    const bool have_audio = audio != nullptr && !(*audio)[0].empty();

    using M = NaturalnessMetric;
    auto need = [&](M m, bool available, const char* what) {
        if (is_required(required, m) && !available) throw MissingInputError(what);
    };
    need(M::wpm, have_words, "WPM needs word counts on every segment");
    for (M m : {M::fwpm, M::rpm, M::lpm, M::bpm}) need(m, have_events, "event rates need event counts on every segment");
    need(M::estd, have_audio, "ESTD needs audio");
    need(M::pstd, have_audio, "PSTD needs audio");
    need(M::spm, trace.duration_ms > 0, "SPM needs a non-empty trace");

    const double per_speech_min = speech_ms > 0 ? 60000.0 / static_cast<double>(speech_ms) : 0.0;
    if (have_words) {
        std::int64_t words = 0;
        for (const auto& ch : trace.channels)
            for (const auto& s : ch) words += *s.words;
        rec.wpm = static_cast<double>(words) * per_speech_min;
    }
    if (have_events) {
        EventCounts total;
        for (const auto& ch : trace.channels)
            for (const auto& s : ch) total += *s.events;
        rec.fwpm = total.fillers * per_speech_min;
        rec.rpm = total.repetitions * per_speech_min;
        rec.lpm = total.laughs * per_speech_min;
        rec.bpm = total.breaths * per_speech_min;
    }

    if (trace.duration_ms > 0) {
        std::int64_t silence_ms = 0, pause_ms = 0;
        std::size_t pauses = 0;
        for (Speaker s : {Speaker::A, Speaker::B}) {
            const auto ts = turn_structure(trace, s);
            silence_ms += ts.within_turn_silence_ms;
            for (const auto& p : ts.pauses) pause_ms += p.length();
            pauses += ts.pauses.size();
        }
        rec.spm_s = (static_cast<double>(silence_ms) / 1000.0) * 60000.0 / static_cast<double>(trace.duration_ms);
        if (pauses > 0) rec.mean_pause_s = static_cast<double>(pause_ms) / 1000.0 / static_cast<double>(pauses);
    }

    if (have_audio) {
        const auto grid = frame_grid(trace);
        std::vector<double> energies, pitches;
        for (int c = 0; c < 2; ++c) {
            const auto& pcm = (*audio)[c];
            const auto rms = frame_rms(pcm);
            const std::size_t frames = std::min(grid.size(), rms.size());
            for (std::size_t f = 0; f < frames; ++f) {
                if (!grid.frames[c][f]) continue;
                energies.push_back(rms[f]);
                const std::span<const std::int16_t> from(pcm.data() + f * kSamplesPerFrame,
                                                         pcm.size() - f * kSamplesPerFrame);
                if (auto f0 = estimate_f0(from)) pitches.push_back(*f0);
            }
        }
        if (!energies.empty()) rec.estd = population_stddev(energies);
        if (!pitches.empty()) {
            double mean = 0;
            for (double p : pitches) mean += p;
            rec.mean_f0_hz = mean / static_cast<double>(pitches.size());
            rec.pstd_hz = population_stddev(pitches);
        }
        if (is_required(required, M::estd) && !rec.estd) throw MissingInputError("ESTD needs speech frames in the audio");
        if (is_required(required, M::pstd) && !rec.pstd_hz) throw MissingInputError("PSTD needs voiced speech frames");
    }
    return rec;
}

} // namespace dde
