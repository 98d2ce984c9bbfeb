#pragma once

#include <array>
#include <deque>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "dde/labeler.hpp"
#include "dde/rng.hpp"
#include "dde/trace.hpp"
#include "dde/units.hpp"

namespace dde {

// Turn-taking from a fixed end-of-turn silence; never barges in or stops early.
struct CascadedConfig {
    std::int64_t eot_silence_ms = 800;
    std::int64_t response_min_ms = 960;
    std::int64_t response_max_ms = 12000;
};

// Parameterised stand-in for a learned dialogue manager. Defaults come from
// dde_calibrate --search.
struct StochasticConfig {
    double p_backchannel_per_tick = 0.008;
    std::int64_t backchannel_ms = 800;
    double p_initiate_per_tick_after_gap = 0.9;
    int min_gap_ticks = 2;
    double p_stop_on_overlap_per_tick = 0.05;
    double pause_insertion_rate = 0.4; // expected pauses per second of response speech
    std::int64_t pause_min_ms = 160;   // resumption waits for the first tick at least this far out
};

struct ScriptEntry {
    Action action = Action::SIL;
    std::optional<std::int64_t> duration_ms; // SPK only; otherwise drawn from the generator
};

// Explicit tick -> action table. Unlisted ticks continue an utterance or stay silent.
struct ScriptedConfig {
    std::map<int, ScriptEntry> table;
};

enum class PolicyKind { cascaded, stochastic, scripted };

struct PolicyConfig {
    std::variant<CascadedConfig, StochasticConfig, ScriptedConfig> params = CascadedConfig{};

    PolicyKind kind() const { return static_cast<PolicyKind>(params.index()); }
};

// Produces raw unit sequences (one unit per 20ms) whose length sets the
// response duration.
struct ResponseGeneratorConfig {
    enum class Kind { lognormal, corpus };
    Kind kind = Kind::lognormal;
    double mean_ms = 2800;
    double sigma = 0.6;
    std::int64_t min_ms = 320;
    std::int64_t max_ms = 12000;
    int alphabet_size = 500;
    int max_run_frames = 4;
    std::vector<UnitSequence> corpus;
};

struct AgentConfig {
    PolicyConfig policy;
    ResponseGeneratorConfig generator;
};

struct SimRun {
    std::int64_t duration_ms = 30000;
    std::uint64_t seed = 0;
    Speaker opener = Speaker::A; // opens the conversation when its policy needs a prompt
    std::int64_t window_ms = kDefaultWindowMs;
    std::array<AgentConfig, 2> agents;
};

enum class Mode { Listening, Speaking };
enum class UtteranceKind { response, backchannel, continuation };

struct AgentState {
    Mode mode = Mode::Listening;
    std::optional<std::int64_t> speech_started_ms; // current utterance
    std::optional<std::int64_t> planned_end_ms;    // present iff Speaking
    Rng rng;

    UtteranceKind current_kind = UtteranceKind::response;
    std::optional<UnitSequence> current_units;
    std::optional<std::int64_t> last_onset_ms;
    std::optional<std::int64_t> last_end_ms;      // any own speech
    std::optional<std::int64_t> last_turn_end_ms; // responses and continuations only
    std::deque<UnitSequence> pending_pieces;      // remainder of a response split by pauses
    std::optional<std::int64_t> resume_at_ms;

    bool operator==(const AgentState&) const = default;
};

// What an agent sees at the start of tick t: the last window_ms of speech
// committed before now = 160t, re-based so that context.duration_ms == now
// maps to the decision instant.
struct Observation {
    ConversationTrace context;
    std::int64_t now_ms = 0;
    int tick_index = 0;
    Speaker self = Speaker::A;
    bool is_opener = false;

    std::int64_t context_start_ms() const { return now_ms - context.duration_ms; }
    // absolute end of the latest speech on a channel inside the context
    std::optional<std::int64_t> last_end_ms(Speaker s) const;
    // speaker is talking in the final millisecond before now
    bool active_at_now(Speaker s) const;
    // how long the speaker's current stretch has lasted (0 when silent)
    std::int64_t current_run_ms(Speaker s) const;
};

struct Decision {
    Action action = Action::SIL;
    UtteranceKind kind = UtteranceKind::response;
    std::optional<std::int64_t> duration_ms{};
};

Decision cascaded_decide(const Observation& obs, const AgentState& state, const CascadedConfig& cfg);
Decision stochastic_decide(const Observation& obs, AgentState& state, const StochasticConfig& cfg);
Decision scripted_decide(const Observation& obs, const AgentState& state, const ScriptedConfig& cfg);
Decision decide(const PolicyConfig& policy, const Observation& obs, AgentState& state);

UnitSequence generate_response(const ResponseGeneratorConfig& cfg, Rng& rng);

// Splits or reshapes a generated response for a policy: cascaded responses are
// clamped and padded to whole ticks; stochastic ones may be cut into pieces
// separated by pauses.
std::vector<UnitSequence> plan_response(const PolicyConfig& policy, UnitSequence units, Rng& rng);

struct Utterance {
    std::int64_t start_ms = 0;
    std::int64_t planned_end_ms = 0;
    std::optional<UnitSequence> units;
    bool operator==(const Utterance&) const = default;
};

struct TickRecord {
    int tick_index = 0;
    std::array<Mode, 2> modes{};
    std::array<Action, 2> actions{};
    bool operator==(const TickRecord&) const = default;
};

struct SimState {
    SimRun run;
    int next_tick = 0;
    std::array<AgentState, 2> agents;
    std::array<std::vector<SpeechSegment>, 2> finished;
    std::array<std::optional<Utterance>, 2> ongoing;
    std::vector<TickRecord> log;

    int total_ticks() const { return static_cast<int>((run.duration_ms + kTickMs - 1) / kTickMs); }
    bool done() const { return next_tick >= total_ticks(); }
};

void validate(const SimRun& run);
SimState init_sim(const SimRun& run);

Observation observe(const SimState& state, Speaker agent);

struct StepResult {
    Action a = Action::SIL;
    Action b = Action::SIL;
};

// Advances one tick. tick_index must equal state.next_tick.
// Throws PolicyContractViolation on an action illegal for the agent's mode.
StepResult step(SimState& state, int tick_index);

// Trace realised so far; ongoing speech is cut at `until_ms`.
ConversationTrace realized_trace(const SimState& state, std::int64_t until_ms);

struct SimResult {
    ConversationTrace trace;
    std::vector<TickRecord> log;
};

SimResult run_selfchat_logged(const SimRun& run);
ConversationTrace run_selfchat(const SimRun& run);

// The calibrated full-duplex configuration shipped as the stochastic default.
StochasticConfig default_stochastic_config();
SimRun cascaded_run(std::int64_t duration_ms, std::uint64_t seed);
SimRun stochastic_run(std::int64_t duration_ms, std::uint64_t seed, const StochasticConfig& cfg = default_stochastic_config());

} // namespace dde
