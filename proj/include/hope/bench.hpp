#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hope/scenegen.hpp"
#include "hope/tracker.hpp"

namespace hope {

/// One experiment's output: a CSV table (every row carries the seed or trial
/// needed to replay it) plus named summary statistics.
struct BenchResult {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, double>> stats;

  double stat(const std::string& name) const;  // throws if missing
  void add_stat(std::string name, double value);
  void write_csv(const std::filesystem::path& path) const;
};

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingParams {
  std::vector<int> agent_counts{32, 64, 128, 256, 384, 512};
  int trials = 20;
  int warmups = 3;
  std::uint64_t seed = 1;
  int attention_width = 16384;
  double agent_density = 0.02;     // agents / m^2 of scene area
  int stream_frames = 100;
  int stream_agents = 384;
  int stream_trials = 3;           // timed runs per stream frame, after one warmup
  double low_fraction = 0.61;      // highway share of the adaptive stream
  int bootstrap_samples = 1000;
};

/// Columns impl,L,trial,latency_ns. impl is attention | ghn for the scaling
/// sweep, and adaptive | lid | always_deep for the mixed stream (L is the
/// stream's agent count, trial the frame index).
BenchResult bench_scaling(const ScalingParams& params);

/// Density-capped benchmark scene: urban layout with L agents on a square of
/// area L / density.
Scenario bench_scene(int agents, double density, std::uint64_t seed);

/// Mixed-scene stream: round(low_fraction * frames) highway frames, the rest
/// cycling through the other scene types, in seeded order. agents > 0 scales
/// every preset to that many agents at the preset's density.
std::vector<ScenarioConfig> mixed_stream(int frames, double low_fraction,
                                         int agents, std::uint64_t seed);

/// Columns scene_type,seed,d_hat,n_used. Seeds run base_seed .. base_seed + seeds - 1.
BenchResult bench_lid_by_scene(int seeds, std::uint64_t base_seed = 0);

struct OcclusionParams {
  std::vector<int> gaps{40, 80};
  std::vector<MemoryMode> modes{MemoryMode::none, MemoryMode::stm, MemoryMode::stm_ltm};
  int seeds = 10;
  std::uint64_t base_seed = 0;
  TrackerConfig tracker;
};

/// Columns suite,gap,mode,seed,events,recovered,occ_track. The scripted
/// suite is one deterministic highway scenario per gap; the random suites
/// draw scene type, occluded objects and start frames from the seed.
BenchResult bench_occlusion(const OcclusionParams& params);

/// Scenario the occlusion suites run on.
Scenario occlusion_scenario(int gap, std::uint64_t seed, bool scripted);

struct RoutingParams {
  int seeds = 20;
  std::uint64_t base_seed = 0;
  int frames = 100;
  double low_fraction = 0.61;
  int agents = 24;  // every frame is scaled to this count so compute depends on the path only
};

/// Columns seed,policy,mean_deviation,operations. Policies: lid
/// (threshold_route on the frame's LID), random (a seeded permutation of the
/// lid paths, so compute matches exactly), shallow and deep.
BenchResult bench_routing_ablation(const RoutingParams& params);

/// Mean over agents of ||P_a - P_b||_F between two runs of the same scene.
double mean_projector_deviation(const HypergraphScene& a, const HypergraphScene& b);

}  // namespace hope
