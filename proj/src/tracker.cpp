#include "hope/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>

#include <Eigen/QR>

namespace hope {

std::string to_string(MemoryMode m) {
  switch (m) {
    case MemoryMode::none:
      return "none";
    case MemoryMode::stm:
      return "stm";
    case MemoryMode::stm_ltm:
      return "stm+ltm";
  }
  return "none";
}

MemoryMode parse_memory_mode(const std::string& s) {
  if (s == "none") return MemoryMode::none;
  if (s == "stm") return MemoryMode::stm;
  if (s == "stm+ltm" || s == "stm_ltm") return MemoryMode::stm_ltm;
  throw Error("unknown memory mode '" + s + "'");
}

Matrix track_key_matrix(int key_dim, std::uint64_t seed) {
  if (key_dim < 1) {
    throw Error("key_dim must be positive");
  }
  Rng rng(mix_seed(seed, 0x6b));
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(key_dim, key_dim);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      g(i, j) = normal(rng);
    }
  }
  Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
  return q;
}

Vector track_key(std::int64_t track_id, int key_dim, std::uint64_t seed) {
  if (track_id < 0) {
    throw Error("track ids are non-negative");
  }
  return track_key_matrix(key_dim, seed).col(track_id % key_dim);
}

namespace {

double cosine(const Vector& a, const Vector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    return 0.0;
  }
  return a.dot(b) / (na * nb);
}

struct Track {
  std::int64_t id = 0;
  Vector feature;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double last_time = 0.0;
  int missed = 0;
  bool has_velocity = false;
  bool alive = true;
  TrackSummary summary;
};

void validate_frames(const std::vector<FrameObservation>& frames) {
  if (frames.empty()) {
    throw Error("track_sequence needs at least one frame");
  }
  Eigen::Index feature_dim = -1;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& frame = frames[f];
    if (!std::isfinite(frame.timestamp) || !(frame.noise_level >= 0.0)) {
      throw Error("malformed frame " + std::to_string(f));
    }
    if (f > 0 && !(frame.timestamp > frames[f - 1].timestamp)) {
      throw Error("frame timestamps must be strictly increasing");
    }
    for (const auto& obj : frame.objects) {
      if (!obj.feature.allFinite() || !obj.position.allFinite() ||
          obj.feature.size() == 0) {
        throw Error("malformed detection in frame " + std::to_string(f));
      }
      if (feature_dim < 0) {
        feature_dim = obj.feature.size();
      } else if (obj.feature.size() != feature_dim) {
        throw Error("detections have mixed feature lengths");
      }
    }
  }
}

// Position is stored as the constant-velocity origin p - v t, which stays
// fixed while the object moves.
Vector pack_value(const Vector& feature, const Vec2& position,
                  const Vec2& velocity, double time) {
  Vector v(feature.size() + 4);
  v << feature, position - velocity * time, velocity;
  return v;
}

}  // namespace

TrackReport track_sequence(const std::vector<FrameObservation>& frames,
                           MemoryMode mode, const TrackerConfig& config,
                           const std::vector<OcclusionWindow>& occlusions) {
  validate_frames(frames);
  const bool use_stm = mode != MemoryMode::none;
  const bool use_ltm = mode == MemoryMode::stm_ltm;

  Eigen::Index feature_dim = 0;
  for (const auto& f : frames) {
    if (!f.objects.empty()) {
      feature_dim = f.objects.front().feature.size();
      break;
    }
  }

  TrackReport report;
  report.mode = mode;
  report.assignments.resize(frames.size());

  std::vector<Track> tracks;  // index == id
  StmBuffer stm(config.stm_capacity);
  std::optional<LtmState> ltm;
  if (use_ltm && feature_dim > 0) {
    ltm.emplace(config.key_dim, static_cast<int>(feature_dim) + 4,
                config.ltm_norm_cap);
  }
  double gate_sum = 0.0;
  long gate_count = 0;
  const Matrix keys = ltm ? track_key_matrix(config.key_dim, config.key_seed) : Matrix();
  auto key_of = [&](std::int64_t id) { return keys.col(id % config.key_dim); };

  auto remember = [&](Track& t, const ObservedObject& obj, double noise,
                      const Vector& predicted) {
    if (!ltm) {
      return;
    }
    const Vector value = pack_value(obj.feature, obj.position, t.velocity, t.last_time);
    const double s = surprise(predicted, value);
    const double g = gate(s, reliability(noise), config.gate);
    ltm->write(key_of(t.id), value, g);
    gate_sum += g;
    ++gate_count;
  };

  for (std::size_t f = 0; f < frames.size(); ++f) {
    const FrameObservation& frame = frames[f];
    const double now = frame.timestamp;
    const auto& dets = frame.objects;
    std::vector<std::int64_t> det_track(dets.size(), -1);

    // Gated candidate pairs for live tracks.
    struct Candidate {
      double cost;
      std::int64_t track;
      std::size_t det;
    };
    std::vector<Candidate> candidates;
    for (const Track& t : tracks) {
      if (!t.alive) {
        continue;
      }
      const double elapsed = now - t.last_time;
      const Vec2 predicted = t.position + t.velocity * elapsed;
      const double sigma = config.sigma_pos * (1.0 + t.missed);
      for (std::size_t d = 0; d < dets.size(); ++d) {
        const double dm = (dets[d].position - predicted).norm() / sigma;
        const double cs = cosine(t.feature, dets[d].feature);
        if (dm <= config.assoc_gate && cs >= config.min_assoc_cos) {
          candidates.push_back(
              {dm + config.feature_weight * (1.0 - cs), t.id, d});
        }
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                if (a.cost != b.cost) return a.cost < b.cost;
                if (a.track != b.track) return a.track < b.track;
                return a.det < b.det;
              });
    std::vector<bool> track_taken(tracks.size(), false);
    for (const auto& c : candidates) {
      if (track_taken[static_cast<std::size_t>(c.track)] || det_track[c.det] >= 0) {
        continue;
      }
      track_taken[static_cast<std::size_t>(c.track)] = true;
      det_track[c.det] = c.track;
    }

    auto observe = [&](Track& t, const ObservedObject& obj, bool fresh) {
      const double elapsed = now - t.last_time;
      Vector predicted;
      if (fresh) {
        predicted = Vector::Zero(obj.feature.size() + 4);
      } else {
        predicted = pack_value(t.feature, t.position + t.velocity * elapsed,
                               t.velocity, now);
      }
      if (!fresh && elapsed > 0.0) {
        const Vec2 measured = (obj.position - t.position) / elapsed;
        if (t.has_velocity) {
          t.velocity += config.velocity_smoothing * (measured - t.velocity);
        } else {
          t.velocity = measured;
          t.has_velocity = true;
        }
        t.feature += config.feature_smoothing * (obj.feature - t.feature);
      }
      t.position = obj.position;
      t.last_time = now;
      t.missed = 0;
      t.alive = true;
      t.summary.last_frame = static_cast<int>(f);
      ++t.summary.observations;
      remember(t, obj, frame.noise_level, predicted);
    };

    for (std::size_t d = 0; d < dets.size(); ++d) {
      if (det_track[d] >= 0) {
        observe(tracks[static_cast<std::size_t>(det_track[d])], dets[d], false);
      }
    }

    // Unmatched detections: STM re-identification, then LTM, then a new id.
    for (std::size_t d = 0; d < dets.size(); ++d) {
      if (det_track[d] >= 0) {
        continue;
      }
      const ObservedObject& obj = dets[d];
      std::int64_t revived = -1;
      auto plausible = [&](const Vec2& predicted, double last_time) {
        const double elapsed = now - last_time;
        return (obj.position - predicted).norm() <=
               config.revive_radius + config.revive_radius_rate * elapsed;
      };

      if (use_stm && !stm.empty()) {
        const StmRetrieval hit =
            stm_cross_attend(obj.feature, stm, config.stm_temperature);
        std::map<std::int64_t, double> mass;
        std::map<std::int64_t, const StmEntry*> latest;
        for (std::size_t i = 0; i < hit.entries.size(); ++i) {
          const StmEntry* e = hit.entries[i];
          mass[e->track_id] += hit.weights[i];
          latest[e->track_id] = e;  // entries run oldest -> newest
        }
        std::int64_t best = -1;
        double best_mass = -1.0;
        for (const auto& [id, m] : mass) {
          if (m > best_mass) {
            best_mass = m;
            best = id;
          }
        }
        if (best >= 0) {
          const Track& t = tracks[static_cast<std::size_t>(best)];
          const StmEntry* e = latest[best];
          if (!t.alive && cosine(hit.retrieved, obj.feature) >= config.revive_cos &&
              plausible(e->position + e->velocity * (now - e->timestamp), e->timestamp)) {
            revived = best;
            ++report.stm_revivals;
          }
        }
      }

      if (revived < 0 && ltm) {
        double best_cos = config.revive_cos;
        for (const Track& t : tracks) {
          if (t.alive) {
            continue;
          }
          const Vector recall = ltm->read(key_of(t.id));
          const Vector feature = recall.head(obj.feature.size());
          const Vec2 origin = recall.segment(obj.feature.size(), 2);
          const Vec2 vel = recall.tail(2);
          const double cs = cosine(feature, obj.feature);
          if (cs >= best_cos && plausible(origin + vel * now, t.last_time)) {
            best_cos = cs;
            revived = t.id;
          }
        }
        if (revived >= 0) {
          ++report.ltm_revivals;
        }
      }

      if (revived >= 0) {
        Track& t = tracks[static_cast<std::size_t>(revived)];
        t.alive = true;
        t.missed = 0;
        if (track_taken.size() < tracks.size()) {
          track_taken.resize(tracks.size(), false);
        }
        track_taken[static_cast<std::size_t>(revived)] = true;
        det_track[d] = revived;
        observe(t, obj, false);
        continue;
      }

      Track t;
      t.id = static_cast<std::int64_t>(tracks.size());
      t.feature = obj.feature;
      t.position = obj.position;
      t.last_time = now;
      t.summary = TrackSummary{t.id, static_cast<int>(f), static_cast<int>(f), 0};
      tracks.push_back(t);
      track_taken.push_back(true);
      det_track[d] = t.id;
      observe(tracks.back(), obj, true);
    }

    // Coast or retire tracks that saw nothing this frame.
    for (Track& t : tracks) {
      if (!t.alive || track_taken[static_cast<std::size_t>(t.id)]) {
        continue;
      }
      ++t.missed;
      if (t.missed >= config.max_coast) {
        t.alive = false;
      }
    }

    std::vector<StmEntry> entries;
    for (std::size_t d = 0; d < dets.size(); ++d) {
      const Track& t = tracks[static_cast<std::size_t>(det_track[d])];
      entries.push_back(StmEntry{t.id, static_cast<std::int64_t>(f), now,
                                 dets[d].feature, dets[d].position, t.velocity});
      if (dets[d].id_hint) {
        report.assignments[f].emplace_back(*dets[d].id_hint, t.id);
      }
    }
    if (use_stm) {
      stm.push_frame(std::move(entries));
    }
  }

  for (const Track& t : tracks) {
    report.tracks.push_back(t.summary);
  }
  report.mean_gate = gate_count ? gate_sum / static_cast<double>(gate_count) : 0.0;

  // Score scripted occlusions.
  auto assigned = [&](int frame, std::int64_t object) -> std::optional<std::int64_t> {
    if (frame < 0 || frame >= static_cast<int>(frames.size())) {
      return std::nullopt;
    }
    for (const auto& [obj, track] : report.assignments[static_cast<std::size_t>(frame)]) {
      if (obj == object) {
        return track;
      }
    }
    return std::nullopt;
  };
  int recovered = 0;
  for (const auto& occ : occlusions) {
    if (occ.duration_frames <= config.occ_threshold_frames) {
      continue;
    }
    const auto before = assigned(occ.start_frame - 1, occ.object_id);
    const auto after = assigned(occ.start_frame + occ.duration_frames, occ.object_id);
    if (!before || !after) {
      continue;
    }
    const bool ok = *before == *after;
    report.events.push_back({occ.object_id, occ.duration_frames, ok});
    recovered += ok ? 1 : 0;
  }
  report.occ_track = report.events.empty()
                         ? 0.0
                         : static_cast<double>(recovered) /
                               static_cast<double>(report.events.size());
  return report;
}

}  // namespace hope
