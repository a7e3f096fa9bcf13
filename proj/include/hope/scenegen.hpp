#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hope/ghn.hpp"
#include "hope/memory.hpp"
#include "hope/point_cloud.hpp"
#include "hope/tracker.hpp"

namespace hope {

enum class SceneType { highway, suburban, urban, intersection, construction, adverse };

inline constexpr std::array<SceneType, 6> kAllSceneTypes = {
    SceneType::highway,      SceneType::suburban,     SceneType::urban,
    SceneType::intersection, SceneType::construction, SceneType::adverse};

std::string to_string(SceneType t);
SceneType parse_scene_type(const std::string& s);

/// Number of channels in the per-point feature vectors emitted by gen_scene:
/// xyz, owner velocity (2), local density, owner height, nine behavior
/// channels.
inline constexpr int kSceneFeatureChannels = 16;

struct ScenarioConfig {
  SceneType scene_type = SceneType::urban;
  int num_agents = 0;
  int motion_dims = 1;       // independent behavior channels per point
  int frames = 1;
  double frame_rate_hz = 10.0;
  double noise_level = 0.0;
  std::vector<OcclusionWindow> occlusions;
  std::uint64_t seed = 0;
  double rho_max = 0.5;      // agents / m^2
  double eps_s = 3.0;        // meters

  // Layout and rendering knobs; defaults come from the scene-type preset.
  double extent_x = 100.0;   // meters
  double extent_y = 40.0;
  int heading_groups = 1;
  int cluster_size = 1;
  double cluster_radius = 0.0;
  double min_separation = 1.0;
  double speed = 10.0;       // m/s
  int points_per_frame = 2048;
  int subspace_ambient = 48;
  int subspace_dim = 32;
  double subspace_noise = 0.01;
  int feature_dim = 32;
  bool with_point_clouds = true;
};

/// Preset for a scene type; `num_agents` and the layout knobs are filled in.
ScenarioConfig default_config(SceneType type, std::uint64_t seed);

struct GroundTruthAgent {
  std::int64_t id = 0;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
};

struct Scenario {
  ScenarioConfig config;
  std::vector<std::vector<GroundTruthAgent>> ground_truth;  // per frame
  std::vector<FrameObservation> observations;                // per frame
  std::vector<PointCloud> clouds;                            // per frame
  std::vector<std::vector<std::int64_t>> point_owner;        // -1: background
  HypergraphScene scene;  // frame-0 agents with subspaces
};

/// N uniform points on a d-dimensional patch in R^n: a random d-flat, or
/// (curved) the flat passed through a coordinatewise sinusoidal warp.
enum class ManifoldKind { linear, curved };
PointCloud gen_manifold(int d, int ambient, int count, ManifoldKind kind,
                        std::uint64_t seed);

/// Builds a scenario without occlusions applied.
Scenario gen_scene(const ScenarioConfig& config);

/// Removes the scripted objects' detections and points over their windows.
Scenario apply_occlusions(Scenario scenario);

/// Agents within eps_s of each agent (itself included), the quantity the
/// density cap bounds.
std::vector<int> neighborhood_counts(const std::vector<AgentState>& agents,
                                     double eps_s);

}  // namespace hope
