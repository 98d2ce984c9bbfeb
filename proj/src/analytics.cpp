#include "dde/analytics.hpp"

#include <algorithm>
#include <string>

#include "dde/error.hpp"

namespace dde {

namespace {

std::vector<Interval> ipus_of(const ConversationTrace& trace, Speaker s) {
    std::vector<Interval> out;
    out.reserve(trace.channel(s).size());
    for (const auto& seg : trace.channel(s)) out.push_back(seg.interval());
    return out;
}

std::vector<Interval> group_turns(const std::vector<Interval>& ipus) {
    std::vector<Interval> turns;
    for (const auto& ipu : ipus) {
        if (!turns.empty() && ipu.start_ms - turns.back().end_ms < kTurnJoinMs)
            turns.back().end_ms = ipu.end_ms;
        else
            turns.push_back(ipu);
    }
    return turns;
}

bool inside_any(const Interval& x, const std::vector<Interval>& sorted) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), x.start_ms,
                               [](std::int64_t t, const Interval& i) { return t < i.start_ms; });
    if (it == sorted.begin()) return false;
    --it;
    return it->start_ms <= x.start_ms && x.end_ms <= it->end_ms;
}

struct TaggedTurn {
    Interval interval;
    Speaker speaker;
};

} // namespace

TurnStructure turn_structure(const ConversationTrace& trace, Speaker speaker) {
    TurnStructure ts;
    ts.ipus = ipus_of(trace, speaker);
    // other speaker's turns over all of their IPUs
    const auto other_turns = group_turns(ipus_of(trace, other(speaker)));

    std::vector<Interval> own;
    for (const auto& ipu : ts.ipus) {
        if (ipu.length() < kBackchannelMaxMs && inside_any(ipu, other_turns))
            ts.backchannel_ipus.push_back(ipu);
        else
            own.push_back(ipu);
    }
    for (std::size_t i = 0; i < own.size(); ++i) {
        if (!ts.turns.empty() && own[i].start_ms - ts.turns.back().end_ms < kTurnJoinMs) {
            const Interval silence{ts.turns.back().end_ms, own[i].start_ms};
            ts.within_turn_silence_ms += silence.length();
            if (silence.length() > kPauseMinMs) ts.pauses.push_back(silence);
            ts.turns.back().end_ms = own[i].end_ms;
        } else {
            ts.turns.push_back(own[i]);
        }
    }
    return ts;
}

CrossChannelEvents cross_channel_events(const ConversationTrace& trace) {
    CrossChannelEvents ev;

    const auto& a = trace.channel(Speaker::A);
    const auto& b = trace.channel(Speaker::B);
    for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
        const std::int64_t lo = std::max(a[i].start_ms, b[j].start_ms);
        const std::int64_t hi = std::min(a[i].end_ms, b[j].end_ms);
        if (lo < hi) ev.overlaps.push_back({lo, hi});
        if (a[i].end_ms < b[j].end_ms) ++i;
        else ++j;
    }

    const TurnStructure structure[2] = {turn_structure(trace, Speaker::A), turn_structure(trace, Speaker::B)};
    std::vector<TaggedTurn> turns;
    for (int c = 0; c < 2; ++c) {
        for (const auto& bc : structure[c].backchannel_ipus) ev.backchannels.push_back({static_cast<Speaker>(c), bc});
        for (const auto& t : structure[c].turns) turns.push_back({t, static_cast<Speaker>(c)});
    }
    std::sort(ev.backchannels.begin(), ev.backchannels.end(), [](const Backchannel& x, const Backchannel& y) {
        return x.interval.start_ms < y.interval.start_ms;
    });
    std::sort(turns.begin(), turns.end(), [](const TaggedTurn& x, const TaggedTurn& y) {
        return x.interval.start_ms < y.interval.start_ms;
    });

    // Sweep the union of both speakers' turns. Each hole between components
    // is a gap when a turn of one speaker ends at its left edge and a turn of
    // the other starts at its right edge.
    bool have_floor = false;
    std::int64_t floor_end = 0;
    std::array<bool, 2> enders{};
    for (std::size_t k = 0; k < turns.size();) {
        const std::int64_t start = turns[k].interval.start_ms;
        std::array<bool, 2> starters{};
        std::size_t end_group = k;
        while (end_group < turns.size() && turns[end_group].interval.start_ms == start)
            starters[index(turns[end_group++].speaker)] = true;

        if (have_floor && start > floor_end) {
            const bool cross = (enders[0] && starters[1]) || (enders[1] && starters[0]);
            if (cross) {
                Speaker from, to;
                if (enders[0] != enders[1]) {
                    from = enders[0] ? Speaker::A : Speaker::B;
                    to = other(from);
                } else if (starters[0] != starters[1]) {
                    to = starters[0] ? Speaker::A : Speaker::B;
                    from = other(to);
                } else {
                    from = Speaker::A;
                    to = Speaker::B;
                }
                ev.gaps.push_back({{floor_end, start}, from, to});
            }
        }
        for (; k < end_group; ++k) {
            const auto& t = turns[k];
            if (!have_floor || t.interval.end_ms > floor_end) {
                floor_end = t.interval.end_ms;
                enders = {};
                enders[index(t.speaker)] = true;
                have_floor = true;
            } else if (t.interval.end_ms == floor_end) {
                enders[index(t.speaker)] = true;
            }
        }
    }
    return ev;
}

ConversationReport conversation_report(const ConversationTrace& trace, const StereoPcm* audio) {
    if (trace.duration_ms <= 0) throw ValidationError("cannot report on a zero-duration trace");
    const auto ev = cross_channel_events(trace);
    std::size_t pauses = 0;
    for (Speaker s : {Speaker::A, Speaker::B}) pauses += turn_structure(trace, s).pauses.size();

    ConversationReport r;
    r.duration_ms = trace.duration_ms;
    r.counts = {ev.overlaps.size(), ev.backchannels.size(), pauses, ev.gaps.size()};
    const double per_min = 60000.0 / static_cast<double>(trace.duration_ms);
    r.overlaps_per_min = static_cast<double>(r.counts.overlaps) * per_min;
    r.backchannels_per_min = static_cast<double>(r.counts.backchannels) * per_min;
    r.pauses_per_min = static_cast<double>(r.counts.pauses) * per_min;
    if (!ev.gaps.empty()) {
        std::int64_t total = 0;
        for (const auto& g : ev.gaps) total += g.ms();
        r.avg_gap_ms = static_cast<double>(total) / static_cast<double>(ev.gaps.size());
    }
    r.naturalness = naturalness_report(trace, audio);
    return r;
}

double f1_score(double precision, double recall) {
    return precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

ClassReport classification_report(std::span<const Action> gold, std::span<const Action> predicted) {
    if (gold.size() != predicted.size())
        throw ValidationError("gold has " + std::to_string(gold.size()) + " labels, predicted has " +
                              std::to_string(predicted.size()));
    if (gold.empty()) throw ValidationError("classification report needs at least one label");

    ClassReport r;
    r.total = gold.size();
    for (std::size_t i = 0; i < gold.size(); ++i) ++r.confusion[action_index(gold[i])][action_index(predicted[i])];

    std::size_t correct = 0, predicted_total = 0;
    for (std::size_t c = 0; c < 4; ++c) {
        auto& s = r.per_class[c];
        s.true_positive = r.confusion[c][c];
        for (std::size_t k = 0; k < 4; ++k) {
            s.support += r.confusion[c][k];
            s.predicted += r.confusion[k][c];
        }
        s.precision = s.predicted ? static_cast<double>(s.true_positive) / static_cast<double>(s.predicted) : 0.0;
        s.recall = s.support ? static_cast<double>(s.true_positive) / static_cast<double>(s.support) : 0.0;
        s.f1 = f1_score(s.precision, s.recall);
        correct += s.true_positive;
        predicted_total += s.predicted;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(r.total);
    r.micro_precision = static_cast<double>(correct) / static_cast<double>(predicted_total);
    return r;
}

} // namespace dde
