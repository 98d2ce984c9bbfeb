#include <algorithm>
#include <cmath>

#include "dde/error.hpp"
#include "dde/trace.hpp"

namespace dde {

namespace {

constexpr double kMinRms = 1e-5; // -100 dBFS

std::vector<Interval> detect_channel(std::span<const std::int16_t> samples, const VadConfig& cfg) {
    const auto rms = frame_rms(samples);
    if (rms.empty()) return {};
    std::vector<double> db(rms.size());
    for (std::size_t i = 0; i < rms.size(); ++i) db[i] = 20.0 * std::log10(std::max(rms[i], kMinRms));

    std::vector<double> sorted = db;
    const auto k = static_cast<std::size_t>(0.05 * static_cast<double>(sorted.size() - 1));
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
    const double threshold = sorted[k] + cfg.energy_threshold_db;

    std::vector<Interval> runs;
    for (std::size_t f = 0; f < db.size(); ++f) {
        if (db[f] <= threshold) continue;
        const std::int64_t t0 = static_cast<std::int64_t>(f) * cfg.frame_ms;
        if (!runs.empty() && runs.back().end_ms == t0) runs.back().end_ms += cfg.frame_ms;
        else runs.push_back({t0, t0 + cfg.frame_ms});
    }

    std::vector<Interval> bridged;
    for (const auto& r : runs) {
        if (!bridged.empty() && r.start_ms - bridged.back().end_ms < cfg.min_gap_ms)
            bridged.back().end_ms = r.end_ms;
        else
            bridged.push_back(r);
    }
    std::erase_if(bridged, [&](const Interval& r) { return r.length() < cfg.min_speech_ms; });
    return bridged;
}

} // namespace

std::vector<double> frame_rms(std::span<const std::int16_t> samples) {
    const std::size_t n = samples.size() / kSamplesPerFrame;
    std::vector<double> out(n);
    for (std::size_t f = 0; f < n; ++f) {
        double acc = 0.0;
        for (std::size_t i = 0; i < kSamplesPerFrame; ++i) {
            const double x = samples[f * kSamplesPerFrame + i] / 32768.0;
            acc += x * x;
        }
        out[f] = std::sqrt(acc / static_cast<double>(kSamplesPerFrame));
    }
    return out;
}

ConversationTrace vad_from_samples(const std::array<std::vector<std::int16_t>, 2>& pcm, const VadConfig& cfg) {
    if (cfg.frame_ms != kFrameMs) throw ValidationError("VAD frame must be 20ms");
    if (cfg.min_speech_ms < cfg.frame_ms) throw ValidationError("min_speech_ms must be at least one frame");
    if (cfg.min_gap_ms < 0) throw ValidationError("min_gap_ms must be non-negative");
    if (pcm[0].size() != pcm[1].size()) throw ValidationError("channels have different sample counts");
    if (pcm[0].empty()) throw ValidationError("empty audio");

    const auto duration_ms = static_cast<std::int64_t>(pcm[0].size() * 1000 / kSampleRate);
    std::vector<SpeakerSegment> events;
    for (int c = 0; c < 2; ++c) {
        for (const auto& r : detect_channel(pcm[c], cfg)) {
            SpeechSegment seg;
            seg.start_ms = r.start_ms;
            seg.end_ms = r.end_ms;
            events.emplace_back(static_cast<Speaker>(c), std::move(seg));
        }
    }
    return build_trace(std::move(events), duration_ms);
}

} // namespace dde
