#include <algorithm>
#include <cmath>

#include "dde/sim.hpp"

namespace dde {

std::optional<std::int64_t> Observation::last_end_ms(Speaker s) const {
    const auto& ch = context.channel(s);
    if (ch.empty()) return std::nullopt;
    return context_start_ms() + ch.back().end_ms;
}

bool Observation::active_at_now(Speaker s) const {
    const auto& ch = context.channel(s);
    return !ch.empty() && ch.back().end_ms == context.duration_ms;
}

std::int64_t Observation::current_run_ms(Speaker s) const {
    if (!active_at_now(s)) return 0;
    return context.duration_ms - context.channel(s).back().start_ms;
}

Decision cascaded_decide(const Observation& obs, const AgentState& state, const CascadedConfig& cfg) {
    if (state.mode == Mode::Speaking) return {Action::CON};
    if (obs.is_opener && obs.tick_index == 0 && !state.last_onset_ms) return {Action::SPK};

    const auto other_end = obs.last_end_ms(other(obs.self));
    if (!other_end) return {Action::SIL};
    const bool already_answered = state.last_onset_ms && *other_end <= *state.last_onset_ms;
    if (already_answered) return {Action::SIL};

    const std::int64_t other_silence = obs.now_ms - *other_end;
    const auto own_end = obs.last_end_ms(obs.self);
    const std::int64_t own_silence = own_end ? obs.now_ms - *own_end : obs.context.duration_ms;
    if (other_silence >= cfg.eot_silence_ms && own_silence >= cfg.eot_silence_ms) return {Action::SPK};
    return {Action::SIL};
}

Decision stochastic_decide(const Observation& obs, AgentState& state, const StochasticConfig& cfg) {
    auto& rng = state.rng;
    const Speaker them = other(obs.self);

    if (state.mode == Mode::Speaking) {
        const bool barge_in = obs.active_at_now(them) && obs.current_run_ms(them) > cfg.backchannel_ms;
        if (state.current_kind != UtteranceKind::backchannel && barge_in &&
            rng.bernoulli(cfg.p_stop_on_overlap_per_tick))
            return {Action::STP};
        return {Action::CON};
    }

    // still finishing our own speech at the start of this tick
    if (state.last_end_ms && *state.last_end_ms >= obs.now_ms) return {Action::SIL};

    if (!state.pending_pieces.empty()) {
        if (state.resume_at_ms && obs.now_ms >= *state.resume_at_ms)
            return {Action::SPK, UtteranceKind::continuation};
        return {Action::SIL};
    }

    if (obs.active_at_now(them)) {
        if (rng.bernoulli(cfg.p_backchannel_per_tick))
            return {Action::SPK, UtteranceKind::backchannel, cfg.backchannel_ms};
        return {Action::SIL};
    }

    const auto their_end = obs.last_end_ms(them);
    const auto own_end = obs.last_end_ms(obs.self);
    const std::int64_t latest = std::max(their_end.value_or(obs.context_start_ms()),
                                         own_end.value_or(obs.context_start_ms()));
    const std::int64_t mutual_silence = obs.now_ms - latest;
    const bool floor_is_open = their_end ? (!state.last_turn_end_ms || *their_end > *state.last_turn_end_ms)
                                         : obs.is_opener && !own_end;
    if (floor_is_open && mutual_silence >= cfg.min_gap_ticks * kTickMs &&
        rng.bernoulli(cfg.p_initiate_per_tick_after_gap))
        return {Action::SPK, UtteranceKind::response};
    return {Action::SIL};
}

Decision scripted_decide(const Observation& obs, const AgentState& state, const ScriptedConfig& cfg) {
    if (auto it = cfg.table.find(obs.tick_index); it != cfg.table.end())
        return {it->second.action, UtteranceKind::response, it->second.duration_ms};
    return {state.mode == Mode::Speaking ? Action::CON : Action::SIL};
}

Decision decide(const PolicyConfig& policy, const Observation& obs, AgentState& state) {
    return std::visit(
        [&](const auto& cfg) -> Decision {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, CascadedConfig>) return cascaded_decide(obs, state, cfg);
            else if constexpr (std::is_same_v<T, StochasticConfig>) return stochastic_decide(obs, state, cfg);
            else return scripted_decide(obs, state, cfg);
        },
        policy.params);
}

namespace {

UnitSequence random_units(std::size_t frames, const ResponseGeneratorConfig& cfg, Rng& rng) {
    UnitSequence out;
    out.reserve(frames);
    while (out.size() < frames) {
        const int unit = static_cast<int>(rng.uniform_int(0, cfg.alphabet_size - 1));
        if (!out.empty() && out.back() == unit) continue;
        const auto run = static_cast<std::size_t>(rng.uniform_int(1, std::max(1, cfg.max_run_frames)));
        for (std::size_t i = 0; i < run && out.size() < frames; ++i) out.push_back(unit);
    }
    return out;
}

} // namespace

UnitSequence generate_response(const ResponseGeneratorConfig& cfg, Rng& rng) {
    if (cfg.kind == ResponseGeneratorConfig::Kind::corpus && !cfg.corpus.empty()) {
        const auto pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(cfg.corpus.size()) - 1));
        return cfg.corpus[pick];
    }
    const double mu = std::log(cfg.mean_ms) - 0.5 * cfg.sigma * cfg.sigma;
    double ms = std::exp(mu + cfg.sigma * rng.normal());
    ms = std::clamp(ms, static_cast<double>(cfg.min_ms), static_cast<double>(cfg.max_ms));
    const auto frames = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(ms / kFrameMs)));
    return random_units(frames, cfg, rng);
}

std::vector<UnitSequence> plan_response(const PolicyConfig& policy, UnitSequence units, Rng& rng) {
    if (units.empty()) units.push_back(0);
    if (const auto* c = std::get_if<CascadedConfig>(&policy.params)) {
        const auto tick = static_cast<std::size_t>(kTickFrames);
        const auto lo = static_cast<std::size_t>((c->response_min_ms + kFrameMs - 1) / kFrameMs);
        const auto hi = std::max<std::size_t>(lo, static_cast<std::size_t>(c->response_max_ms / kFrameMs));
        std::size_t n = std::clamp(units.size(), lo, hi);
        n = std::max(tick, (n + tick - 1) / tick * tick);
        if (n > hi && n > tick) n -= tick;
        units.resize(n, units.back());
        return {std::move(units)};
    }
    if (const auto* s = std::get_if<StochasticConfig>(&policy.params)) {
        const auto min_piece = static_cast<std::size_t>(kTickFrames);
        const double seconds = static_cast<double>(units_duration_ms(units)) / 1000.0;
        const int cuts = rng.poisson(s->pause_insertion_rate * seconds);
        if (cuts == 0 || units.size() < 2 * min_piece) return {std::move(units)};
        std::vector<std::size_t> at;
        for (int i = 0; i < cuts; ++i)
            at.push_back(static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(min_piece),
                                                                  static_cast<std::int64_t>(units.size() - min_piece))));
        std::sort(at.begin(), at.end());
        std::vector<UnitSequence> pieces;
        std::size_t from = 0;
        for (std::size_t cut : at) {
            if (cut - from < min_piece || units.size() - cut < min_piece) continue;
            pieces.emplace_back(units.begin() + static_cast<std::ptrdiff_t>(from),
                                units.begin() + static_cast<std::ptrdiff_t>(cut));
            from = cut;
        }
        pieces.emplace_back(units.begin() + static_cast<std::ptrdiff_t>(from), units.end());
        return pieces;
    }
    return {std::move(units)};
}

} // namespace dde
