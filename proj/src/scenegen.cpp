#include "hope/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace hope {

std::string to_string(SceneType t) {
  switch (t) {
    case SceneType::highway:
      return "highway";
    case SceneType::suburban:
      return "suburban";
    case SceneType::urban:
      return "urban";
    case SceneType::intersection:
      return "intersection";
    case SceneType::construction:
      return "construction";
    case SceneType::adverse:
      return "adverse";
  }
  return "urban";
}

SceneType parse_scene_type(const std::string& s) {
  for (SceneType t : kAllSceneTypes) {
    if (to_string(t) == s) {
      return t;
    }
  }
  throw Error("unknown scene type '" + s + "'");
}

ScenarioConfig default_config(SceneType type, std::uint64_t seed) {
  ScenarioConfig c;
  c.scene_type = type;
  c.seed = seed;
  switch (type) {
    case SceneType::highway:
      c.num_agents = 12;
      c.motion_dims = 1;
      c.extent_x = 300.0;
      c.extent_y = 15.0;
      c.heading_groups = 1;
      c.cluster_size = 1;
      c.min_separation = 10.0;
      c.speed = 25.0;
      break;
    case SceneType::suburban:
      c.num_agents = 16;
      c.motion_dims = 4;
      c.extent_x = 120.0;
      c.extent_y = 60.0;
      c.heading_groups = 2;
      c.cluster_size = 2;
      c.cluster_radius = 4.0;
      c.min_separation = 2.0;
      c.speed = 12.0;
      break;
    case SceneType::urban:
      c.num_agents = 24;
      c.motion_dims = 6;
      c.extent_x = 100.0;
      c.extent_y = 80.0;
      c.heading_groups = 4;
      c.cluster_size = 3;
      c.cluster_radius = 4.0;
      c.min_separation = 1.5;
      c.speed = 8.0;
      break;
    case SceneType::intersection:
      c.num_agents = 32;
      c.motion_dims = 8;
      c.extent_x = 60.0;
      c.extent_y = 60.0;
      c.heading_groups = 6;
      c.cluster_size = 4;
      c.cluster_radius = 4.0;
      c.min_separation = 1.2;
      c.speed = 6.0;
      break;
    case SceneType::construction:
      c.num_agents = 24;
      c.motion_dims = 13;
      c.extent_x = 80.0;
      c.extent_y = 40.0;
      c.heading_groups = 4;
      c.cluster_size = 4;
      c.cluster_radius = 4.0;
      c.min_separation = 1.2;
      c.speed = 5.0;
      c.noise_level = 2.0;
      break;
    case SceneType::adverse:
      c.num_agents = 20;
      c.motion_dims = 12;
      c.extent_x = 100.0;
      c.extent_y = 40.0;
      c.heading_groups = 4;
      c.cluster_size = 3;
      c.cluster_radius = 4.0;
      c.min_separation = 1.5;
      c.speed = 8.0;
      c.noise_level = 2.5;
      break;
  }
  return c;
}

PointCloud gen_manifold(int d, int ambient, int count, ManifoldKind kind,
                        std::uint64_t seed) {
  if (d < 1 || ambient < 1 || d > ambient) {
    throw Error("gen_manifold needs 1 <= d <= n");
  }
  if (count < 1) {
    throw Error("gen_manifold needs a positive point count");
  }
  constexpr double kSide = 10.0;
  constexpr double kWarpAmplitude = 1.0;
  constexpr double kWarpFrequency = 0.6;  // amplitude * frequency < 1: injective
  const Subspace frame = random_subspace(ambient, d, mix_seed(seed, 1));
  Rng rng(mix_seed(seed, 2));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector offset(ambient);
  for (int c = 0; c < ambient; ++c) {
    offset(c) = 5.0 * unit(rng);
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(count) * ambient);
  Vector local(d);
  Vector p(ambient);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < d; ++j) {
      local(j) = kSide * unit(rng);
    }
    p = offset + frame.basis() * local;
    if (kind == ManifoldKind::curved) {
      const Vector flat = p;
      for (int c = 0; c < ambient; ++c) {
        p(c) += kWarpAmplitude * std::sin(kWarpFrequency * flat((c + 1) % ambient));
      }
    }
    values.insert(values.end(), p.data(), p.data() + ambient);
  }
  return PointCloud(static_cast<std::size_t>(ambient), std::move(values));
}

std::vector<int> neighborhood_counts(const std::vector<AgentState>& agents,
                                     double eps_s) {
  std::vector<int> counts(agents.size(), 0);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = 0; j < agents.size(); ++j) {
      if ((agents[i].position - agents[j].position).norm() <= eps_s) {
        ++counts[i];
      }
    }
  }
  return counts;
}

namespace {

void validate(const ScenarioConfig& c) {
  if (c.num_agents < 1) {
    throw Error("infeasible scene");
  }
  if (c.frames < 1 || !(c.frame_rate_hz > 0.0) || !(c.noise_level >= 0.0) ||
      !(c.rho_max > 0.0) || !(c.eps_s > 0.0) || !(c.extent_x > 0.0) ||
      !(c.extent_y > 0.0) || c.heading_groups < 1 || c.cluster_size < 1 ||
      c.points_per_frame < 16 || c.feature_dim < 1 || c.motion_dims < 0 ||
      c.motion_dims > kSceneFeatureChannels - 3 || c.subspace_dim < 1 ||
      c.subspace_dim > c.subspace_ambient) {
    throw Error("invalid scenario config");
  }
  if (static_cast<double>(c.num_agents) > c.rho_max * c.extent_x * c.extent_y) {
    throw Error("infeasible scene");
  }
  for (const auto& occ : c.occlusions) {
    if (occ.start_frame < 0 || occ.duration_frames < 0 ||
        occ.start_frame + occ.duration_frames > c.frames) {
      throw Error("occlusion window outside the scenario");
    }
  }
}

struct Layout {
  std::vector<Vec2> positions;
  std::vector<int> group;
};

// Clustered placement honoring min_separation and the neighborhood cap
// ceil(rho_max * pi * eps_s^2) for every agent.
Layout place_agents(const ScenarioConfig& c, Rng& rng) {
  const int cap = max_hyperedge_membership(c.rho_max, c.eps_s);
  std::uniform_real_distribution<double> ux(0.0, c.extent_x);
  std::uniform_real_distribution<double> uy(0.0, c.extent_y);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick_group(0, c.heading_groups - 1);
  Layout out;
  std::vector<int> near_count;  // agents within eps_s, itself included

  auto fits = [&](const Vec2& p) {
    int mine = 1;
    for (std::size_t j = 0; j < out.positions.size(); ++j) {
      const double dist = (out.positions[j] - p).norm();
      if (dist < c.min_separation) {
        return false;
      }
      if (dist <= c.eps_s) {
        if (near_count[j] + 1 > cap) {
          return false;
        }
        ++mine;
      }
    }
    return mine <= cap;
  };
  auto commit = [&](const Vec2& p, int g) {
    int mine = 1;
    for (std::size_t j = 0; j < out.positions.size(); ++j) {
      if ((out.positions[j] - p).norm() <= c.eps_s) {
        ++near_count[j];
        ++mine;
      }
    }
    out.positions.push_back(p);
    out.group.push_back(g);
    near_count.push_back(mine);
  };

  constexpr int kAttempts = 400;
  while (static_cast<int>(out.positions.size()) < c.num_agents) {
    const int g = pick_group(rng);
    Vec2 center;
    bool placed_center = false;
    for (int a = 0; a < kAttempts && !placed_center; ++a) {
      center = Vec2(ux(rng), uy(rng));
      placed_center = fits(center);
    }
    if (!placed_center) {
      throw Error("infeasible scene");
    }
    commit(center, g);
    for (int m = 1; m < c.cluster_size &&
                    static_cast<int>(out.positions.size()) < c.num_agents;
         ++m) {
      for (int a = 0; a < kAttempts; ++a) {
        const double r = c.cluster_radius * std::sqrt(unit(rng));
        const double th = 2.0 * std::numbers::pi * unit(rng);
        const Vec2 p = center + r * Vec2(std::cos(th), std::sin(th));
        if (fits(p)) {
          commit(p, g);
          break;
        }
      }
    }
  }
  return out;
}

constexpr double kBoxLength = 4.5;
constexpr double kBoxWidth = 1.9;
constexpr double kBoxHeight = 1.6;
constexpr double kBehaviorAmplitude = 10.0;
constexpr double kAgentPointShare = 0.4;
constexpr double kChannelNoise = 1.0;  // per unit noise_level

// Channel activation order for behavior variation: the nine behavior
// channels first, then velocity, density and height.
constexpr std::array<int, 13> kActivationOrder = {7, 8, 9, 10, 11, 12, 13, 14, 15,
                                                  3, 4, 5, 6};

}  // namespace

Scenario gen_scene(const ScenarioConfig& config) {
  validate(config);
  Scenario sc;
  sc.config = config;
  Rng rng(mix_seed(config.seed, 0xa11));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Layout layout = place_agents(config, rng);
  const int count = config.num_agents;

  // Heading groups: highway traffic all runs along +x; others spread.
  // Every agent of a group shares one velocity, so within-group spacing (and
  // with it hyperedge membership) is the same in every frame.
  std::vector<double> headings(static_cast<std::size_t>(config.heading_groups));
  std::vector<double> speeds(static_cast<std::size_t>(config.heading_groups));
  for (int g = 0; g < config.heading_groups; ++g) {
    speeds[static_cast<std::size_t>(g)] = config.speed * (0.8 + 0.4 * unit(rng));
    headings[static_cast<std::size_t>(g)] =
        config.scene_type == SceneType::highway
            ? 0.0
            : 2.0 * std::numbers::pi * g / config.heading_groups + 0.3 * normal(rng);
  }

  // Agents: subspace near the group's base subspace, feature unit vector.
  std::vector<Subspace> bases;
  for (int g = 0; g < config.heading_groups; ++g) {
    bases.push_back(random_subspace(config.subspace_ambient, config.subspace_dim,
                                    mix_seed(config.seed, 100 + g)));
  }
  std::vector<Vector> features;
  sc.scene.agents.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    AgentState& a = sc.scene.agents[static_cast<std::size_t>(i)];
    const int g = layout.group[static_cast<std::size_t>(i)];
    a.id = i;
    a.position = layout.positions[static_cast<std::size_t>(i)];
    const double th = headings[static_cast<std::size_t>(g)];
    a.velocity = speeds[static_cast<std::size_t>(g)] * Vec2(std::cos(th), std::sin(th));
    Matrix noise(config.subspace_ambient, config.subspace_dim);
    for (Eigen::Index cidx = 0; cidx < noise.cols(); ++cidx) {
      for (Eigen::Index r = 0; r < noise.rows(); ++r) {
        noise(r, cidx) = normal(rng);
      }
    }
    a.subspace = qr_retract(bases[static_cast<std::size_t>(g)].basis() +
                            config.subspace_noise * noise);
    Vector f(config.feature_dim);
    for (int j = 0; j < config.feature_dim; ++j) {
      f(j) = normal(rng);
    }
    features.push_back(f / f.norm());
  }
  sc.scene.edges = build_hyperedges(sc.scene.agents, config.eps_s, GhnParams{}.eps_g);

  const std::vector<int> density = neighborhood_counts(sc.scene.agents, config.eps_s);
  const double area = std::numbers::pi * config.eps_s * config.eps_s;
  const double det_pos_sigma = 0.05 + 0.1 * config.noise_level;
  const double det_feat_sigma = 0.01 + 0.02 * config.noise_level;
  const double channel_noise = kChannelNoise * config.noise_level;

  const int agent_points = std::max(
      2, static_cast<int>(kAgentPointShare * config.points_per_frame / count));
  const int ground_points =
      std::max(8, config.points_per_frame - agent_points * count);

  for (int f = 0; f < config.frames; ++f) {
    const double t = f / config.frame_rate_hz;
    std::vector<GroundTruthAgent> truth;
    FrameObservation obs;
    obs.timestamp = t;
    obs.noise_level = config.noise_level;
    for (int i = 0; i < count; ++i) {
      const AgentState& a = sc.scene.agents[static_cast<std::size_t>(i)];
      const Vec2 p = a.position + a.velocity * t;
      truth.push_back({a.id, p, a.velocity});
      ObservedObject o;
      o.id_hint = a.id;
      o.position = p + det_pos_sigma * Vec2(normal(rng), normal(rng));
      o.feature = features[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < o.feature.size(); ++j) {
        o.feature(j) += det_feat_sigma * normal(rng);
      }
      obs.objects.push_back(std::move(o));
    }
    sc.ground_truth.push_back(std::move(truth));
    sc.observations.push_back(std::move(obs));

    if (!config.with_point_clouds) {
      continue;
    }
    PointCloud cloud;
    std::vector<std::int64_t> owners;
    std::array<double, kSceneFeatureChannels> pt{};
    auto emit = [&](std::int64_t owner) {
      for (int m = 0; m < config.motion_dims; ++m) {
        pt[static_cast<std::size_t>(kActivationOrder[static_cast<std::size_t>(m)])] +=
            kBehaviorAmplitude * unit(rng);
      }
      if (channel_noise > 0.0) {
        for (double& v : pt) {
          v += channel_noise * normal(rng);
        }
      }
      cloud.push_back(pt);
      owners.push_back(owner);
    };
    for (int i = 0; i < count; ++i) {
      const AgentState& a = sc.scene.agents[static_cast<std::size_t>(i)];
      const Vec2 center = a.position + a.velocity * t;
      const double th = std::atan2(a.velocity.y(), a.velocity.x());
      const Vec2 along(std::cos(th), std::sin(th));
      const Vec2 across(-along.y(), along.x());
      for (int k = 0; k < agent_points; ++k) {
        // Top face or one of the two long sides, by area.
        const double top = kBoxLength * kBoxWidth;
        const double side = kBoxLength * kBoxHeight;
        const double pick = unit(rng) * (top + 2.0 * side);
        const double u = (unit(rng) - 0.5) * kBoxLength;
        double v = 0.0;
        double z = 0.0;
        if (pick < top) {
          v = (unit(rng) - 0.5) * kBoxWidth;
          z = kBoxHeight;
        } else {
          v = pick < top + side ? -0.5 * kBoxWidth : 0.5 * kBoxWidth;
          z = unit(rng) * kBoxHeight;
        }
        const Vec2 xy = center + u * along + v * across;
        pt.fill(0.0);
        pt[0] = xy.x();
        pt[1] = xy.y();
        pt[2] = z;
        pt[3] = a.velocity.x();
        pt[4] = a.velocity.y();
        pt[5] = density[static_cast<std::size_t>(i)] / area;
        pt[6] = kBoxHeight;
        emit(a.id);
      }
    }
    for (int k = 0; k < ground_points; ++k) {
      pt.fill(0.0);
      pt[0] = config.extent_x * unit(rng);
      pt[1] = config.extent_y * unit(rng);
      emit(-1);
    }
    sc.clouds.push_back(std::move(cloud));
    sc.point_owner.push_back(std::move(owners));
  }
  return sc;
}

Scenario apply_occlusions(Scenario sc) {
  std::set<std::int64_t> known;
  for (const auto& a : sc.scene.agents) {
    known.insert(a.id);
  }
  for (const auto& occ : sc.config.occlusions) {
    if (!known.count(occ.object_id)) {
      throw Error("unknown object_id " + std::to_string(occ.object_id));
    }
    if (occ.start_frame < 0 || occ.duration_frames < 0 ||
        occ.start_frame + occ.duration_frames >
            static_cast<int>(sc.observations.size())) {
      throw Error("occlusion window outside the scenario");
    }
  }
  for (const auto& occ : sc.config.occlusions) {
    for (int f = occ.start_frame; f < occ.start_frame + occ.duration_frames; ++f) {
      auto& objs = sc.observations[static_cast<std::size_t>(f)].objects;
      std::erase_if(objs, [&](const ObservedObject& o) {
        return o.id_hint && *o.id_hint == occ.object_id;
      });
      if (static_cast<std::size_t>(f) < sc.clouds.size()) {
        const PointCloud& cloud = sc.clouds[static_cast<std::size_t>(f)];
        const auto& owners = sc.point_owner[static_cast<std::size_t>(f)];
        PointCloud kept;
        std::vector<std::int64_t> kept_owner;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
          if (owners[i] != occ.object_id) {
            kept.push_back(cloud.point(i));
            kept_owner.push_back(owners[i]);
          }
        }
        sc.clouds[static_cast<std::size_t>(f)] = std::move(kept);
        sc.point_owner[static_cast<std::size_t>(f)] = std::move(kept_owner);
      }
    }
  }
  return sc;
}

}  // namespace hope
