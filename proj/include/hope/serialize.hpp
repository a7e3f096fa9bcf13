#pragma once

#include <filesystem>

#include <json.hpp>

#include "hope/ghn.hpp"
#include "hope/lid.hpp"
#include "hope/router.hpp"
#include "hope/scenegen.hpp"
#include "hope/tracker.hpp"

namespace hope {

using Json = nlohmann::json;

Json to_json(const LidEstimate& e);

/// {"centers":[..3], "beta", "tau1", "tau2", "mode"}; missing keys keep
/// their defaults.
RouterParams router_params_from_json(const Json& j);
RouteMode route_mode_from_json(const Json& j, RouteMode fallback);
Json to_json(const RouteDecision& d);

/// {"n", "k", "basis":[row-major]}.
Json to_json(const Subspace& s);
Subspace subspace_from_json(const Json& j);

Json to_json(const GhnParams& p);
GhnParams ghn_params_from_json(const Json& j);

/// {"agents":[{"id","position","velocity","subspace"}], "params":{...},
///  "edges":[[member ids]]}
Json scene_to_json(const HypergraphScene& scene, const GhnParams& params);
HypergraphScene scene_from_json(const Json& j);

Json to_json(const FrameObservation& f);
FrameObservation frame_observation_from_json(const Json& j);

Json to_json(const TrackReport& r);
Json to_json(const ScenarioConfig& c);
ScenarioConfig scenario_config_from_json(const Json& j);

/// scenario.json (config + ground truth + initial scene), scene.json,
/// frames/frame_%05d.hpc and frames/obs_%05d.json.
void write_scenario_dir(const std::filesystem::path& dir, const Scenario& sc);

/// Observations and config back from a scenario directory.
struct ScenarioFiles {
  ScenarioConfig config;
  std::vector<FrameObservation> observations;
};
ScenarioFiles read_scenario_dir(const std::filesystem::path& dir);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace hope
