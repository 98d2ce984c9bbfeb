#include "dde/sim_io.hpp"

#include <string>

#include "dde/error.hpp"
#include "dde/trace_io.hpp"

namespace dde {

using ojson = nlohmann::ordered_json;

PolicyKind parse_policy_kind(const std::string& name) {
    if (name == "cascaded") return PolicyKind::cascaded;
    if (name == "stochastic") return PolicyKind::stochastic;
    if (name == "scripted") return PolicyKind::scripted;
    throw ValidationError("unknown policy kind '" + name + "'");
}

ojson policy_to_json(const PolicyConfig& policy) {
    ojson j;
    if (const auto* c = std::get_if<CascadedConfig>(&policy.params)) {
        j["kind"] = "cascaded";
        j["eot_silence_ms"] = c->eot_silence_ms;
        j["response_min_ms"] = c->response_min_ms;
        j["response_max_ms"] = c->response_max_ms;
    } else if (const auto* s = std::get_if<StochasticConfig>(&policy.params)) {
        j["kind"] = "stochastic";
        j["p_backchannel_per_tick"] = s->p_backchannel_per_tick;
        j["backchannel_ms"] = s->backchannel_ms;
        j["p_initiate_per_tick_after_gap"] = s->p_initiate_per_tick_after_gap;
        j["min_gap_ticks"] = s->min_gap_ticks;
        j["p_stop_on_overlap_per_tick"] = s->p_stop_on_overlap_per_tick;
        j["pause_insertion_rate"] = s->pause_insertion_rate;
        j["pause_min_ms"] = s->pause_min_ms;
    } else {
        const auto& sc = std::get<ScriptedConfig>(policy.params);
        j["kind"] = "scripted";
        ojson table = ojson::array();
        for (const auto& [tick, e] : sc.table) {
            ojson row = {{"tick", tick}, {"action", std::string(action_name(e.action))}};
            if (e.duration_ms) row["duration_ms"] = *e.duration_ms;
            table.push_back(std::move(row));
        }
        j["table"] = std::move(table);
    }
    return j;
}

PolicyConfig policy_from_json(const ojson& j) {
    PolicyConfig p;
    switch (parse_policy_kind(j.at("kind").get<std::string>())) {
    case PolicyKind::cascaded: {
        CascadedConfig c;
        c.eot_silence_ms = j.value("eot_silence_ms", c.eot_silence_ms);
        c.response_min_ms = j.value("response_min_ms", c.response_min_ms);
        c.response_max_ms = j.value("response_max_ms", c.response_max_ms);
        p.params = c;
        break;
    }
    case PolicyKind::stochastic: {
        StochasticConfig s;
        s.p_backchannel_per_tick = j.value("p_backchannel_per_tick", s.p_backchannel_per_tick);
        s.backchannel_ms = j.value("backchannel_ms", s.backchannel_ms);
        s.p_initiate_per_tick_after_gap = j.value("p_initiate_per_tick_after_gap", s.p_initiate_per_tick_after_gap);
        s.min_gap_ticks = j.value("min_gap_ticks", s.min_gap_ticks);
        s.p_stop_on_overlap_per_tick = j.value("p_stop_on_overlap_per_tick", s.p_stop_on_overlap_per_tick);
        s.pause_insertion_rate = j.value("pause_insertion_rate", s.pause_insertion_rate);
        s.pause_min_ms = j.value("pause_min_ms", s.pause_min_ms);
        p.params = s;
        break;
    }
    case PolicyKind::scripted: {
        ScriptedConfig sc;
        for (const auto& row : j.value("table", ojson::array())) {
            ScriptEntry e;
            e.action = parse_action(row.at("action").get<std::string>());
            if (auto it = row.find("duration_ms"); it != row.end()) e.duration_ms = it->get<std::int64_t>();
            sc.table[row.at("tick").get<int>()] = e;
        }
        p.params = sc;
        break;
    }
    }
    return p;
}

ojson generator_to_json(const ResponseGeneratorConfig& g) {
    ojson j;
    j["kind"] = g.kind == ResponseGeneratorConfig::Kind::corpus ? "corpus" : "lognormal";
    j["mean_ms"] = g.mean_ms;
    j["sigma"] = g.sigma;
    j["min_ms"] = g.min_ms;
    j["max_ms"] = g.max_ms;
    j["alphabet_size"] = g.alphabet_size;
    j["max_run_frames"] = g.max_run_frames;
    if (!g.corpus.empty()) j["corpus"] = g.corpus;
    return j;
}

ResponseGeneratorConfig generator_from_json(const ojson& j) {
    ResponseGeneratorConfig g;
    const std::string kind = j.value("kind", std::string("lognormal"));
    if (kind == "corpus") g.kind = ResponseGeneratorConfig::Kind::corpus;
    else if (kind != "lognormal") throw ValidationError("unknown generator kind '" + kind + "'");
    g.mean_ms = j.value("mean_ms", g.mean_ms);
    g.sigma = j.value("sigma", g.sigma);
    g.min_ms = j.value("min_ms", g.min_ms);
    g.max_ms = j.value("max_ms", g.max_ms);
    g.alphabet_size = j.value("alphabet_size", g.alphabet_size);
    g.max_run_frames = j.value("max_run_frames", g.max_run_frames);
    if (auto it = j.find("corpus"); it != j.end()) g.corpus = it->get<std::vector<UnitSequence>>();
    if (g.kind == ResponseGeneratorConfig::Kind::corpus && g.corpus.empty())
        throw ValidationError("corpus generator needs a non-empty corpus");
    return g;
}

ojson run_to_json(const SimRun& run) {
    ojson j;
    j["duration_ms"] = run.duration_ms;
    j["seed"] = run.seed;
    j["opener"] = std::string(1, speaker_name(run.opener));
    j["window_ms"] = run.window_ms;
    ojson agents = ojson::array();
    for (const auto& a : run.agents)
        agents.push_back({{"policy", policy_to_json(a.policy)}, {"generator", generator_to_json(a.generator)}});
    j["agents"] = std::move(agents);
    return j;
}

SimRun run_from_json(const ojson& j) {
    try {
        SimRun run;
        run.duration_ms = j.value("duration_ms", run.duration_ms);
        run.seed = j.value("seed", run.seed);
        run.opener = parse_speaker(j.value("opener", std::string("A")));
        run.window_ms = j.value("window_ms", run.window_ms);
        if (auto it = j.find("policy"); it != j.end())
            for (auto& a : run.agents) a.policy = policy_from_json(*it);
        if (auto it = j.find("generator"); it != j.end())
            for (auto& a : run.agents) a.generator = generator_from_json(*it);
        if (auto it = j.find("agents"); it != j.end()) {
            if (!it->is_array() || it->size() != 2) throw ValidationError("agents must list exactly 2 entries");
            for (int k = 0; k < 2; ++k) {
                const auto& aj = (*it)[k];
                if (auto p = aj.find("policy"); p != aj.end()) run.agents[k].policy = policy_from_json(*p);
                if (auto g = aj.find("generator"); g != aj.end()) run.agents[k].generator = generator_from_json(*g);
            }
        }
        validate(run);
        return run;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed run config: ") + e.what());
    }
}

} // namespace dde
