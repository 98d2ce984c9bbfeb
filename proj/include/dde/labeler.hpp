#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dde/trace.hpp"
#include "dde/units.hpp"

namespace dde {

// Output vocabulary. Unit id u occupies slot u + kUnitTokenOffset.
constexpr int kPadToken = 0;
constexpr int kBosToken = 1;
constexpr int kEosToken = 2;
constexpr int kUnitTokenOffset = 7;

enum class Action : int { SIL = 3, CON = 4, SPK = 5, STP = 6 };

constexpr std::array<Action, 4> kAllActions = {Action::SIL, Action::CON, Action::SPK, Action::STP};

constexpr int token_id(Action a) { return static_cast<int>(a); }
constexpr std::size_t action_index(Action a) { return static_cast<std::size_t>(static_cast<int>(a) - 3); }
std::string_view action_name(Action a);
Action parse_action(std::string_view name);

struct TrainingSample {
    ConversationTrace context;        // windowed, ends at the tick boundary
    std::int64_t context_start_ms = 0; // where the window starts in the source trace
    Speaker agent = Speaker::A;
    int tick_index = 0;
    Action action = Action::SIL;
    std::optional<std::vector<int>> target_tokens;
};

// Labels tick [160i, 160i+160) of the agent's channel. Precedence:
// onset in the tick -> SPK; offset in the tick while the other speaker is
// active -> STP; agent speaking across the tick end -> CON; otherwise SIL.
Action label_tick(const ConversationTrace& trace, Speaker agent, int tick_index);

// One label per complete tick, computed in a single pass.
std::vector<Action> label_all(const ConversationTrace& trace, Speaker agent);

// One sample per complete tick. SPK targets come from the units of the
// segment starting in the tick (dedup, then BPE when a vocab is given).
std::vector<TrainingSample> build_samples(const ConversationTrace& trace, Speaker agent,
                                          std::int64_t window_ms = kDefaultWindowMs,
                                          const BpeVocab* vocab = nullptr);

// SIL/CON/STP -> [id]; SPK -> [5, u+7 ..., 2]. SPK requires units.
std::vector<int> encode_target(Action action, std::optional<std::span<const int>> bpe_unit_ids = std::nullopt);

// {agent, tick_index, action, target_tokens?, context_ref | context}
nlohmann::ordered_json sample_to_json(const TrainingSample& sample, bool inline_context);

} // namespace dde
