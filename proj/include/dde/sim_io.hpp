#pragma once

#include <json.hpp>

#include "dde/sim.hpp"

namespace dde {

// Run config file:
//   {duration_ms, seed, opener, window_ms,
//    agents: [{policy: {kind, ...}, generator: {...}}, {...}]}
// A top-level "policy" / "generator" applies to both agents unless an agent
// entry overrides it. Missing fields take their defaults.
nlohmann::ordered_json policy_to_json(const PolicyConfig& policy);
PolicyConfig policy_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json generator_to_json(const ResponseGeneratorConfig& g);
ResponseGeneratorConfig generator_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json run_to_json(const SimRun& run);
SimRun run_from_json(const nlohmann::ordered_json& j);

PolicyKind parse_policy_kind(const std::string& name);

} // namespace dde
