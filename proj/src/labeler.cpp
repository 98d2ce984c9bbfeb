#include "dde/labeler.hpp"

#include <algorithm>
#include <string>

#include "dde/error.hpp"
#include "dde/trace_io.hpp"

namespace dde {

namespace {

// Index of the first segment with end_ms >= t.
std::size_t first_ending_at_or_after(const Channel& ch, std::int64_t t) {
    auto it = std::lower_bound(ch.begin(), ch.end(), t,
                               [](const SpeechSegment& s, std::int64_t v) { return s.end_ms < v; });
    return static_cast<std::size_t>(it - ch.begin());
}

// Other speaker was talking in the final millisecond before `instant`.
bool active_just_before(const Channel& ch, std::int64_t instant) {
    const std::size_t i = first_ending_at_or_after(ch, instant);
    return i < ch.size() && ch[i].start_ms < instant;
}

Action classify(const Channel& mine, const Channel& theirs, std::int64_t a, std::int64_t b) {
    // segments touching (a, b]: those with end >= a+1 and start < b+1
    const std::size_t first = first_ending_at_or_after(mine, a + 1);
    bool onset = false, stop = false, speaking_at_end = false;
    for (std::size_t i = first; i < mine.size() && mine[i].start_ms <= b; ++i) {
        const auto& s = mine[i];
        if (s.start_ms >= a && s.start_ms < b) onset = true;
        if (s.end_ms > a && s.end_ms <= b && active_just_before(theirs, s.end_ms)) stop = true;
        if (s.start_ms < b && b < s.end_ms) speaking_at_end = true;
    }
    if (onset) return Action::SPK;
    if (stop) return Action::STP;
    if (speaking_at_end) return Action::CON;
    return Action::SIL;
}

void check_tick(const ConversationTrace& trace, int tick_index) {
    if (tick_index < 0 || kTickMs * (tick_index + 1) > trace.duration_ms)
        throw ValidationError("tick " + std::to_string(tick_index) + " is not inside a " +
                              std::to_string(trace.duration_ms) + "ms trace");
}

} // namespace

std::string_view action_name(Action a) {
    switch (a) {
    case Action::SIL: return "SIL";
    case Action::CON: return "CON";
    case Action::SPK: return "SPK";
    case Action::STP: return "STP";
    }
    return "?";
}

Action parse_action(std::string_view name) {
    for (Action a : kAllActions)
        if (action_name(a) == name) return a;
    throw ValidationError("unknown action '" + std::string(name) + "'");
}

Action label_tick(const ConversationTrace& trace, Speaker agent, int tick_index) {
    check_tick(trace, tick_index);
    const std::int64_t a = kTickMs * tick_index;
    return classify(trace.channel(agent), trace.channel(other(agent)), a, a + kTickMs);
}

std::vector<Action> label_all(const ConversationTrace& trace, Speaker agent) {
    const auto ticks = static_cast<int>(trace.duration_ms / kTickMs);
    std::vector<Action> out;
    out.reserve(ticks);
    for (int i = 0; i < ticks; ++i) {
        const std::int64_t a = kTickMs * i;
        out.push_back(classify(trace.channel(agent), trace.channel(other(agent)), a, a + kTickMs));
    }
    return out;
}

std::vector<int> encode_target(Action action, std::optional<std::span<const int>> bpe_unit_ids) {
    if (action != Action::SPK) return {token_id(action)};
    if (!bpe_unit_ids) throw ValidationError("SPK target requires unit ids");
    std::vector<int> out;
    out.reserve(bpe_unit_ids->size() + 2);
    out.push_back(token_id(Action::SPK));
    for (int u : *bpe_unit_ids) {
        if (u < 0) throw ValidationError("negative unit id in SPK target");
        out.push_back(u + kUnitTokenOffset);
    }
    out.push_back(kEosToken);
    return out;
}

std::vector<TrainingSample> build_samples(const ConversationTrace& trace, Speaker agent, std::int64_t window_ms,
                                          const BpeVocab* vocab) {
    const auto labels = label_all(trace, agent);
    const Channel& mine = trace.channel(agent);
    std::vector<TrainingSample> samples;
    samples.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::int64_t a = kTickMs * static_cast<std::int64_t>(i);
        const std::int64_t b = a + kTickMs;
        TrainingSample s;
        s.context = window(trace, b, window_ms);
        s.context_start_ms = std::max<std::int64_t>(0, b - window_ms);
        s.agent = agent;
        s.tick_index = static_cast<int>(i);
        s.action = labels[i];
        if (s.action == Action::SPK) {
            auto it = std::lower_bound(mine.begin(), mine.end(), a,
                                       [](const SpeechSegment& seg, std::int64_t v) { return seg.start_ms < v; });
            if (it != mine.end() && it->start_ms < b && it->units) {
                UnitSequence units = dedup(*it->units);
                if (vocab) units = bpe_encode(*vocab, units);
                s.target_tokens = encode_target(Action::SPK, std::span<const int>(units));
            }
        } else {
            s.target_tokens = encode_target(s.action);
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

nlohmann::ordered_json sample_to_json(const TrainingSample& sample, bool inline_context) {
    nlohmann::ordered_json j;
    j["agent"] = std::string(1, speaker_name(sample.agent));
    j["tick_index"] = sample.tick_index;
    j["action"] = std::string(action_name(sample.action));
    if (sample.target_tokens) j["target_tokens"] = *sample.target_tokens;
    if (inline_context) {
        j["context"] = trace_to_json(sample.context);
    } else {
        j["context_ref"] = {{"start_ms", sample.context_start_ms},
                            {"end_ms", sample.context_start_ms + sample.context.duration_ms}};
    }
    return j;
}

} // namespace dde
