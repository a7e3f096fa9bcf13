#include "hope/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <unordered_map>

namespace hope {

namespace {

Json vec2_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }

Vec2 vec2_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw IoError("expected a 2-vector");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json vector_json(const Vector& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from(const Json& j) {
  const auto raw = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(raw.data(), static_cast<Eigen::Index>(raw.size()));
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows.push_back(vector_json(m.row(r).transpose()));
  }
  return rows;
}

Matrix matrix_from(const Json& j) {
  if (!j.is_array()) {
    throw IoError("expected a matrix");
  }
  if (j.empty()) {
    return {};
  }
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (row.size() != static_cast<std::size_t>(m.cols())) {
      throw IoError("ragged matrix");
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (j.contains(key)) {
    out = j.at(key).get<T>();
  }
}

}  // namespace

Json to_json(const LidEstimate& e) {
  return {{"d_hat", e.d_hat},
          {"n_used", e.n_used},
          {"method", to_string(e.method)},
          {"discard_fraction", e.discard_fraction}};
}

RouterParams router_params_from_json(const Json& j) {
  RouterParams p;
  if (j.contains("centers")) {
    const auto c = j.at("centers").get<std::vector<double>>();
    if (c.size() != kNumPaths) {
      throw Error("router config needs exactly 3 centers");
    }
    std::copy(c.begin(), c.end(), p.centers.begin());
  }
  read_opt(j, "beta", p.beta);
  read_opt(j, "tau1", p.tau1);
  read_opt(j, "tau2", p.tau2);
  p.validate();
  return p;
}

RouteMode route_mode_from_json(const Json& j, RouteMode fallback) {
  if (j.contains("mode")) {
    return parse_route_mode(j.at("mode").get<std::string>());
  }
  return fallback;
}

Json to_json(const RouteDecision& d) {
  return {{"weights", std::vector<double>(d.weights.begin(), d.weights.end())},
          {"selected", d.selected},
          {"rounds", d.spec.rounds},
          {"subspace_dim", d.spec.subspace_dim}};
}

Json to_json(const Subspace& s) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(s.ambient() * s.dim()));
  for (int r = 0; r < s.ambient(); ++r) {
    for (int c = 0; c < s.dim(); ++c) {
      flat.push_back(s.basis()(r, c));
    }
  }
  return {{"n", s.ambient()}, {"k", s.dim()}, {"basis", flat}};
}

Subspace subspace_from_json(const Json& j) {
  const int n = j.at("n").get<int>();
  const int k = j.at("k").get<int>();
  const auto flat = j.at("basis").get<std::vector<double>>();
  if (n < 1 || k < 1 || flat.size() != static_cast<std::size_t>(n) * k) {
    throw IoError("subspace basis has the wrong size");
  }
  Matrix m(n, k);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < k; ++c) {
      m(r, c) = flat[static_cast<std::size_t>(r * k + c)];
    }
  }
  return Subspace(std::move(m));
}

Json to_json(const GhnParams& p) {
  Json j = {{"eta", p.eta},         {"eps_s", p.eps_s},
            {"eps_g", p.eps_g},     {"rho_max", p.rho_max},
            {"seed", p.seed}};
  if (p.phi_weights.size()) {
    j["phi_weights"] = matrix_json(p.phi_weights);
  }
  if (p.psi_weights.size()) {
    j["psi_weights"] = matrix_json(p.psi_weights);
  }
  return j;
}

GhnParams ghn_params_from_json(const Json& j) {
  GhnParams p;
  read_opt(j, "eta", p.eta);
  read_opt(j, "eps_s", p.eps_s);
  read_opt(j, "eps_g", p.eps_g);
  read_opt(j, "rho_max", p.rho_max);
  read_opt(j, "seed", p.seed);
  if (j.contains("phi_weights")) {
    p.phi_weights = matrix_from(j.at("phi_weights"));
  }
  if (j.contains("psi_weights")) {
    p.psi_weights = matrix_from(j.at("psi_weights"));
  }
  p.validate();
  return p;
}

Json scene_to_json(const HypergraphScene& scene, const GhnParams& params) {
  Json agents = Json::array();
  for (const auto& a : scene.agents) {
    agents.push_back({{"id", a.id},
                      {"position", vec2_json(a.position)},
                      {"velocity", vec2_json(a.velocity)},
                      {"subspace", to_json(a.subspace)}});
  }
  Json edges = Json::array();
  for (const auto& e : scene.edges) {
    Json ids = Json::array();
    for (int i : e.members) {
      ids.push_back(scene.agents.at(static_cast<std::size_t>(i)).id);
    }
    edges.push_back(ids);
  }
  return {{"agents", agents}, {"params", to_json(params)}, {"edges", edges}};
}

HypergraphScene scene_from_json(const Json& j) {
  HypergraphScene scene;
  std::unordered_map<std::int64_t, int> index;
  for (const auto& a : j.at("agents")) {
    AgentState s;
    s.id = a.at("id").get<std::int64_t>();
    s.position = vec2_from(a.at("position"));
    if (a.contains("velocity")) {
      s.velocity = vec2_from(a.at("velocity"));
    }
    s.subspace = subspace_from_json(a.at("subspace"));
    index[s.id] = static_cast<int>(scene.agents.size());
    scene.agents.push_back(std::move(s));
  }
  if (j.contains("edges")) {
    for (const auto& e : j.at("edges")) {
      Hyperedge edge;
      for (const auto& id : e) {
        const auto it = index.find(id.get<std::int64_t>());
        if (it == index.end()) {
          throw IoError("edge references an unknown agent id");
        }
        edge.members.push_back(it->second);
      }
      if (edge.members.empty()) {
        throw IoError("empty hyperedge in scene file");
      }
      scene.edges.push_back(std::move(edge));
    }
  }
  return scene;
}

Json to_json(const FrameObservation& f) {
  Json objects = Json::array();
  for (const auto& o : f.objects) {
    Json obj = {{"feature", vector_json(o.feature)},
                {"position", vec2_json(o.position)}};
    obj["id_hint"] = o.id_hint ? Json(*o.id_hint) : Json(nullptr);
    objects.push_back(std::move(obj));
  }
  return {{"timestamp", f.timestamp},
          {"noise_level", f.noise_level},
          {"objects", objects}};
}

FrameObservation frame_observation_from_json(const Json& j) {
  FrameObservation f;
  f.timestamp = j.at("timestamp").get<double>();
  read_opt(j, "noise_level", f.noise_level);
  for (const auto& o : j.at("objects")) {
    ObservedObject obj;
    if (o.contains("id_hint") && !o.at("id_hint").is_null()) {
      obj.id_hint = o.at("id_hint").get<std::int64_t>();
    }
    obj.feature = vector_from(o.at("feature"));
    obj.position = vec2_from(o.at("position"));
    f.objects.push_back(std::move(obj));
  }
  return f;
}

Json to_json(const TrackReport& r) {
  Json events = Json::array();
  for (const auto& e : r.events) {
    events.push_back(
        {{"object", e.object}, {"gap_frames", e.gap_frames}, {"recovered", e.recovered}});
  }
  Json tracks = Json::array();
  for (const auto& t : r.tracks) {
    tracks.push_back({{"id", t.id},
                      {"first_frame", t.first_frame},
                      {"last_frame", t.last_frame},
                      {"observations", t.observations}});
  }
  return {{"mode", to_string(r.mode)},
          {"occ_track", r.occ_track},
          {"events", events},
          {"tracks", tracks},
          {"stm_revivals", r.stm_revivals},
          {"ltm_revivals", r.ltm_revivals},
          {"mean_gate", r.mean_gate}};
}

Json to_json(const ScenarioConfig& c) {
  Json occ = Json::array();
  for (const auto& o : c.occlusions) {
    occ.push_back({{"object_id", o.object_id},
                   {"start_frame", o.start_frame},
                   {"duration_frames", o.duration_frames}});
  }
  return {{"scene_type", to_string(c.scene_type)},
          {"num_agents", c.num_agents},
          {"motion_dims", c.motion_dims},
          {"frames", c.frames},
          {"frame_rate_hz", c.frame_rate_hz},
          {"noise_level", c.noise_level},
          {"occlusions", occ},
          {"seed", c.seed},
          {"rho_max", c.rho_max},
          {"eps_s", c.eps_s},
          {"extent_x", c.extent_x},
          {"extent_y", c.extent_y},
          {"heading_groups", c.heading_groups},
          {"cluster_size", c.cluster_size},
          {"cluster_radius", c.cluster_radius},
          {"min_separation", c.min_separation},
          {"speed", c.speed},
          {"points_per_frame", c.points_per_frame},
          {"subspace_ambient", c.subspace_ambient},
          {"subspace_dim", c.subspace_dim},
          {"subspace_noise", c.subspace_noise},
          {"feature_dim", c.feature_dim},
          {"with_point_clouds", c.with_point_clouds}};
}

ScenarioConfig scenario_config_from_json(const Json& j) {
  const SceneType type = parse_scene_type(j.at("scene_type").get<std::string>());
  ScenarioConfig c = default_config(type, j.value("seed", std::uint64_t{0}));
  read_opt(j, "num_agents", c.num_agents);
  read_opt(j, "motion_dims", c.motion_dims);
  read_opt(j, "frames", c.frames);
  read_opt(j, "frame_rate_hz", c.frame_rate_hz);
  read_opt(j, "noise_level", c.noise_level);
  read_opt(j, "rho_max", c.rho_max);
  read_opt(j, "eps_s", c.eps_s);
  read_opt(j, "extent_x", c.extent_x);
  read_opt(j, "extent_y", c.extent_y);
  read_opt(j, "heading_groups", c.heading_groups);
  read_opt(j, "cluster_size", c.cluster_size);
  read_opt(j, "cluster_radius", c.cluster_radius);
  read_opt(j, "min_separation", c.min_separation);
  read_opt(j, "speed", c.speed);
  read_opt(j, "points_per_frame", c.points_per_frame);
  read_opt(j, "subspace_ambient", c.subspace_ambient);
  read_opt(j, "subspace_dim", c.subspace_dim);
  read_opt(j, "subspace_noise", c.subspace_noise);
  read_opt(j, "feature_dim", c.feature_dim);
  read_opt(j, "with_point_clouds", c.with_point_clouds);
  if (j.contains("occlusions")) {
    for (const auto& o : j.at("occlusions")) {
      c.occlusions.push_back({o.at("object_id").get<std::int64_t>(),
                              o.at("start_frame").get<int>(),
                              o.at("duration_frames").get<int>()});
    }
  }
  return c;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << j.dump(2) << '\n';
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

namespace {

std::string frame_name(const char* prefix, std::size_t f, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%05zu.%s", prefix, f, ext);
  return buf;
}

}  // namespace

void write_scenario_dir(const std::filesystem::path& dir, const Scenario& sc) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "frames", ec);
  if (ec) {
    throw IoError("cannot create " + (dir / "frames").string() + ": " + ec.message());
  }
  Json truth = Json::array();
  for (const auto& frame : sc.ground_truth) {
    Json agents = Json::array();
    for (const auto& a : frame) {
      agents.push_back({{"id", a.id},
                        {"position", vec2_json(a.position)},
                        {"velocity", vec2_json(a.velocity)}});
    }
    truth.push_back(agents);
  }
  GhnParams params;
  params.eps_s = sc.config.eps_s;
  params.rho_max = sc.config.rho_max;
  const Json scene = scene_to_json(sc.scene, params);
  write_json_file(dir / "scenario.json",
                  {{"config", to_json(sc.config)}, {"ground_truth", truth}, {"scene", scene}});
  write_json_file(dir / "scene.json", scene);
  for (std::size_t f = 0; f < sc.observations.size(); ++f) {
    write_json_file(dir / "frames" / frame_name("obs", f, "json"),
                    to_json(sc.observations[f]));
    if (f < sc.clouds.size()) {
      write_hpc(dir / "frames" / frame_name("frame", f, "hpc"), sc.clouds[f]);
    }
  }
}

ScenarioFiles read_scenario_dir(const std::filesystem::path& dir) {
  ScenarioFiles out;
  const Json meta = read_json_file(dir / "scenario.json");
  out.config = scenario_config_from_json(meta.at("config"));
  for (int f = 0; f < out.config.frames; ++f) {
    out.observations.push_back(frame_observation_from_json(read_json_file(
        dir / "frames" / frame_name("obs", static_cast<std::size_t>(f), "json"))));
  }
  return out;
}

}  // namespace hope
