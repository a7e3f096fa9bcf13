#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hope/memory.hpp"

namespace hope {

enum class MemoryMode { none, stm, stm_ltm };

std::string to_string(MemoryMode m);
MemoryMode parse_memory_mode(const std::string& s);  // none|stm|stm+ltm

/// Scripted removal of one object's detections over [start, start+duration).
struct OcclusionWindow {
  std::int64_t object_id = 0;
  int start_frame = 0;
  int duration_frames = 0;
};

struct TrackerConfig {
  double assoc_gate = 3.0;        // gate on normalized position residual
  double sigma_pos = 1.0;         // meters, one-frame prediction spread
  double min_assoc_cos = 0.5;
  double feature_weight = 2.0;    // cost weight on (1 - cos)
  int max_coast = 3;              // missed frames before a track dies
  std::size_t stm_capacity = StmBuffer::kDefaultCapacity;
  double stm_temperature = 0.02;
  double revive_cos = 0.9;
  double revive_radius = 5.0;     // meters at zero elapsed time
  double revive_radius_rate = 1.5;  // extra meters per second dead
  double velocity_smoothing = 0.2;
  double feature_smoothing = 0.3;
  int key_dim = 128;
  std::uint64_t key_seed = 0x5eed;
  double ltm_norm_cap = 1e6;
  GateParams gate;
  int occ_threshold_frames = 3;
};

struct OcclusionEvent {
  std::int64_t object = 0;
  int gap_frames = 0;
  bool recovered = false;
};

struct TrackSummary {
  std::int64_t id = 0;
  int first_frame = 0;
  int last_frame = 0;
  int observations = 0;
};

struct TrackReport {
  MemoryMode mode = MemoryMode::none;
  double occ_track = 0.0;  // 0 when there are no scored events
  std::vector<OcclusionEvent> events;
  std::vector<TrackSummary> tracks;
  /// Per frame: (ground-truth object, assigned track id) for every
  /// detection carrying an id hint.
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> assignments;
  double mean_gate = 0.0;  // mean LTM write gate (stm+ltm only)
  int ltm_revivals = 0;
  int stm_revivals = 0;

  std::size_t scored_events() const { return events.size(); }
};

/// Greedy gated nearest-neighbor tracking with optional short-term (STM
/// window re-identification) and long-term (delta-rule LTM) memory.
/// Occlusion events come from `occlusions`; only gaps longer than
/// config.occ_threshold_frames that have a visible frame on both sides are
/// scored.
TrackReport track_sequence(const std::vector<FrameObservation>& frames,
                           MemoryMode mode, const TrackerConfig& config,
                           const std::vector<OcclusionWindow>& occlusions = {});

/// Seeded random orthogonal key_dim x key_dim matrix.
Matrix track_key_matrix(int key_dim, std::uint64_t seed);

/// Stable unit key for a track id: column (id mod key_dim) of
/// track_key_matrix, so up to key_dim live keys are exactly orthogonal.
Vector track_key(std::int64_t track_id, int key_dim, std::uint64_t seed);

}  // namespace hope
