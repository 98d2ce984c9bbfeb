#include "dde/sim.hpp"

#include <algorithm>
#include <string>

#include "dde/error.hpp"

namespace dde {

namespace {

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string(name) + " must be in [0, 1]");
}

void check_positive(std::int64_t v, const char* name) {
    if (v <= 0) throw ValidationError(std::string(name) + " must be positive");
}

// Cuts a realised stretch of speech to `end`, keeping units when frames align.
SpeechSegment cut_segment(std::int64_t start, std::int64_t end, const std::optional<UnitSequence>& units) {
    SpeechSegment seg;
    seg.start_ms = start;
    seg.end_ms = end;
    const std::int64_t len = end - start;
    if (units && start % kFrameMs == 0 && len % kFrameMs == 0 &&
        static_cast<std::int64_t>(units->size()) * kFrameMs >= len)
        seg.units.emplace(units->begin(), units->begin() + len / kFrameMs);
    return seg;
}

std::int64_t pause_min_ms(const PolicyConfig& policy) {
    if (const auto* s = std::get_if<StochasticConfig>(&policy.params)) return s->pause_min_ms;
    return StochasticConfig{}.pause_min_ms;
}

void finalize(SimState& st, int k, std::int64_t end, bool stopped) {
    auto& agent = st.agents[k];
    auto& utt = *st.ongoing[k];
    end = std::min(end, st.run.duration_ms);
    st.finished[k].push_back(cut_segment(utt.start_ms, end, utt.units));

    agent.mode = Mode::Listening;
    agent.speech_started_ms.reset();
    agent.planned_end_ms.reset();
    agent.current_units.reset();
    agent.last_end_ms = end;
    if (agent.current_kind != UtteranceKind::backchannel) agent.last_turn_end_ms = end;
    if (stopped) {
        agent.pending_pieces.clear();
        agent.resume_at_ms.reset();
    } else if (!agent.pending_pieces.empty()) {
        const std::int64_t earliest = end + pause_min_ms(st.run.agents[k].policy);
        agent.resume_at_ms = (earliest + kTickMs - 1) / kTickMs * kTickMs;
    }
    st.ongoing[k].reset();
}

void start_utterance(SimState& st, int k, const Decision& d, std::int64_t now) {
    auto& agent = st.agents[k];
    const auto& cfg = st.run.agents[k];
    Utterance utt;
    utt.start_ms = now;
    std::int64_t duration = 0;

    switch (d.kind) {
    case UtteranceKind::continuation:
        if (agent.pending_pieces.empty())
            throw PolicyContractViolation(st.next_tick, k, "continuation requested with nothing pending");
        utt.units = std::move(agent.pending_pieces.front());
        agent.pending_pieces.pop_front();
        agent.resume_at_ms.reset();
        duration = units_duration_ms(*utt.units);
        break;
    case UtteranceKind::backchannel:
    case UtteranceKind::response:
        if (d.duration_ms) {
            if (*d.duration_ms <= 0)
                throw PolicyContractViolation(st.next_tick, k, "non-positive utterance duration");
            duration = *d.duration_ms;
            if (duration % kFrameMs == 0) {
                ResponseGeneratorConfig g = cfg.generator;
                g.kind = ResponseGeneratorConfig::Kind::lognormal;
                g.min_ms = g.max_ms = duration;
                g.mean_ms = static_cast<double>(duration);
                utt.units = generate_response(g, agent.rng);
                utt.units->resize(static_cast<std::size_t>(duration / kFrameMs), utt.units->back());
            }
        } else {
            auto pieces = plan_response(cfg.policy, generate_response(cfg.generator, agent.rng), agent.rng);
            utt.units = std::move(pieces.front());
            agent.pending_pieces.assign(std::make_move_iterator(pieces.begin() + 1),
                                        std::make_move_iterator(pieces.end()));
            agent.resume_at_ms.reset();
            duration = units_duration_ms(*utt.units);
        }
        break;
    }
    utt.planned_end_ms = now + duration;

    agent.mode = Mode::Speaking;
    agent.speech_started_ms = now;
    agent.planned_end_ms = utt.planned_end_ms;
    agent.current_kind = d.kind;
    agent.current_units = utt.units;
    agent.last_onset_ms = now;
    st.ongoing[k] = std::move(utt);
}

} // namespace

void validate(const SimRun& run) {
    check_positive(run.duration_ms, "duration_ms");
    check_positive(run.window_ms, "window_ms");
    for (const auto& agent : run.agents) {
        const auto& g = agent.generator;
        check_positive(static_cast<std::int64_t>(g.mean_ms), "generator.mean_ms");
        check_positive(g.min_ms, "generator.min_ms");
        check_positive(g.max_ms, "generator.max_ms");
        check_positive(g.alphabet_size, "generator.alphabet_size");
        if (g.sigma < 0) throw ValidationError("generator.sigma must be non-negative");
        if (g.min_ms > g.max_ms) throw ValidationError("generator.min_ms exceeds max_ms");
        for (const auto& seq : g.corpus)
            if (seq.empty()) throw ValidationError("generator corpus holds an empty sequence");

        if (const auto* c = std::get_if<CascadedConfig>(&agent.policy.params)) {
            check_positive(c->eot_silence_ms, "eot_silence_ms");
            check_positive(c->response_min_ms, "response_min_ms");
            check_positive(c->response_max_ms, "response_max_ms");
            if (c->response_min_ms > c->response_max_ms)
                throw ValidationError("response_min_ms exceeds response_max_ms");
        } else if (const auto* s = std::get_if<StochasticConfig>(&agent.policy.params)) {
            check_probability(s->p_backchannel_per_tick, "p_backchannel_per_tick");
            check_probability(s->p_initiate_per_tick_after_gap, "p_initiate_per_tick_after_gap");
            check_probability(s->p_stop_on_overlap_per_tick, "p_stop_on_overlap_per_tick");
            check_positive(s->backchannel_ms, "backchannel_ms");
            check_positive(s->pause_min_ms, "pause_min_ms");
            if (s->min_gap_ticks < 0) throw ValidationError("min_gap_ticks must be non-negative");
            if (s->pause_insertion_rate < 0) throw ValidationError("pause_insertion_rate must be non-negative");
        } else if (const auto* sc = std::get_if<ScriptedConfig>(&agent.policy.params)) {
            for (const auto& [tick, entry] : sc->table) {
                if (tick < 0) throw ValidationError("scripted tick must be non-negative");
                if (entry.duration_ms && *entry.duration_ms <= 0)
                    throw ValidationError("scripted duration must be positive");
            }
        }
    }
}

SimState init_sim(const SimRun& run) {
    validate(run);
    SimState st;
    st.run = run;
    for (int k = 0; k < 2; ++k) st.agents[k].rng = Rng(agent_stream_seed(run.seed, k));
    return st;
}

Observation observe(const SimState& st, Speaker agent) {
    Observation obs;
    obs.now_ms = kTickMs * st.next_tick;
    obs.tick_index = st.next_tick;
    obs.self = agent;
    obs.is_opener = agent == st.run.opener;
    const std::int64_t now = obs.now_ms;
    const std::int64_t left = std::max<std::int64_t>(0, now - st.run.window_ms);
    obs.context.duration_ms = now - left;
    if (now == 0) return obs;

    for (int k = 0; k < 2; ++k) {
        auto add = [&](std::int64_t start, std::int64_t end, const std::optional<UnitSequence>& units) {
            const std::int64_t lo = std::max(start, left), hi = std::min(end, now);
            if (lo >= hi) return;
            SpeechSegment seg = cut_segment(start, hi, units);
            if (lo > start && seg.units) {
                seg.units->erase(seg.units->begin(), seg.units->begin() + (lo - start) / kFrameMs);
                if ((lo - start) % kFrameMs != 0) seg.units.reset();
            }
            seg.start_ms = lo - left;
            seg.end_ms = hi - left;
            obs.context.channels[k].push_back(std::move(seg));
        };
        const auto& done = st.finished[k];
        auto it = std::upper_bound(done.begin(), done.end(), left,
                                   [](std::int64_t t, const SpeechSegment& s) { return t < s.end_ms; });
        for (; it != done.end(); ++it) add(it->start_ms, it->end_ms, it->units);
        if (st.ongoing[k]) add(st.ongoing[k]->start_ms, st.ongoing[k]->planned_end_ms, st.ongoing[k]->units);
    }
    return obs;
}

StepResult step(SimState& st, int tick_index) {
    if (st.done()) throw ValidationError("simulation already finished");
    if (tick_index != st.next_tick)
        throw ValidationError("expected tick " + std::to_string(st.next_tick) + ", got " + std::to_string(tick_index));
    const std::int64_t now = kTickMs * tick_index;
    const std::int64_t tick_end = now + kTickMs;

    // utterances that end inside this tick are over before anyone decides
    for (int k = 0; k < 2; ++k) {
        if (st.ongoing[k] && st.ongoing[k]->planned_end_ms <= tick_end) finalize(st, k, st.ongoing[k]->planned_end_ms, false);
    }

    const std::array<Observation, 2> obs = {observe(st, Speaker::A), observe(st, Speaker::B)};
    std::array<Decision, 2> decisions;
    for (int k = 0; k < 2; ++k) decisions[k] = decide(st.run.agents[k].policy, obs[k], st.agents[k]);

    TickRecord rec;
    rec.tick_index = tick_index;
    for (int k = 0; k < 2; ++k) {
        rec.modes[k] = st.agents[k].mode;
        rec.actions[k] = decisions[k].action;
    }

    for (int k = 0; k < 2; ++k) {
        const Action act = decisions[k].action;
        const std::string name(action_name(act));
        if (st.agents[k].mode == Mode::Speaking) {
            if (act == Action::STP) finalize(st, k, tick_end, true);
            else if (act != Action::CON) throw PolicyContractViolation(tick_index, k, name + " while speaking");
        } else {
            if (act == Action::SPK) {
                const auto& last = st.agents[k].last_end_ms;
                if (last && *last >= now)
                    throw PolicyContractViolation(tick_index, k, "SPK before own speech has ended");
                start_utterance(st, k, decisions[k], now);
            } else if (act != Action::SIL) {
                throw PolicyContractViolation(tick_index, k, name + " while listening");
            }
        }
    }
    st.log.push_back(rec);
    ++st.next_tick;
    return {rec.actions[0], rec.actions[1]};
}

ConversationTrace realized_trace(const SimState& st, std::int64_t until_ms) {
    std::vector<SpeakerSegment> events;
    for (int k = 0; k < 2; ++k) {
        for (const auto& seg : st.finished[k]) {
            if (seg.start_ms >= until_ms) continue;
            if (seg.end_ms <= until_ms) events.emplace_back(static_cast<Speaker>(k), seg);
            else events.emplace_back(static_cast<Speaker>(k), cut_segment(seg.start_ms, until_ms, seg.units));
        }
        if (const auto& utt = st.ongoing[k]; utt && utt->start_ms < until_ms)
            events.emplace_back(static_cast<Speaker>(k),
                                cut_segment(utt->start_ms, std::min(utt->planned_end_ms, until_ms), utt->units));
    }
    return build_trace(std::move(events), until_ms);
}

SimResult run_selfchat_logged(const SimRun& run) {
    SimState st = init_sim(run);
    while (!st.done()) step(st, st.next_tick);
    return {realized_trace(st, run.duration_ms), std::move(st.log)};
}

ConversationTrace run_selfchat(const SimRun& run) { return run_selfchat_logged(run).trace; }

StochasticConfig default_stochastic_config() { return StochasticConfig{}; }

SimRun cascaded_run(std::int64_t duration_ms, std::uint64_t seed) {
    SimRun run;
    run.duration_ms = duration_ms;
    run.seed = seed;
    for (auto& a : run.agents) a.policy.params = CascadedConfig{};
    return run;
}

SimRun stochastic_run(std::int64_t duration_ms, std::uint64_t seed, const StochasticConfig& cfg) {
    SimRun run;
    run.duration_ms = duration_ms;
    run.seed = seed;
    for (auto& a : run.agents) a.policy.params = cfg;
    return run;
}

} // namespace dde
