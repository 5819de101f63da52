#pragma once

#include "csma/model.hpp"
#include "csma/sim.hpp"

#include <json.hpp>

#include <string>
#include <utility>

namespace csma {

using Scenario = std::pair<SystemParams, std::vector<NodeProfile>>;

/// Parses the scenario schema:
/// {"b":.., "noise_ratio":.., "t0":.., "rts_len":..,
///  "nodes":[{"period":.., "demand":.., "frame_success":{"kind":..}}]}
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

Scenario load_scenario(const std::string& path);

nlohmann::json to_json(const Vector& v);
nlohmann::json sim_report_to_json(const SimReport& r);

}  // namespace csma
