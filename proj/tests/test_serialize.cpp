#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hope/scenegen.hpp"
#include "hope/serialize.hpp"

namespace fs = std::filesystem;
using hope::Json;

TEST_CASE("lid and route JSON shapes") {
  const Json lid = hope::to_json(hope::LidEstimate{3.5, 100, hope::LidMethod::mle, 0.1});
  CHECK(lid.at("d_hat") == 3.5);
  CHECK(lid.at("n_used") == 100);
  CHECK(lid.at("method") == "mle");
  const Json route = hope::to_json(hope::threshold_route(14.5, {}));
  CHECK(route.at("selected") == 2);
  CHECK(route.at("rounds") == 6);
  CHECK(route.at("subspace_dim") == 32);
  CHECK(route.at("weights").size() == 3);
}

TEST_CASE("router config parsing") {
  const Json j = Json::parse(R"({"centers":[1,2,3],"beta":2.5,"tau1":4,"tau2":9,"mode":"hard"})");
  const auto p = hope::router_params_from_json(j);
  CHECK(p.centers == hope::PathWeights{1, 2, 3});
  CHECK(p.beta == 2.5);
  CHECK(p.tau2 == 9.0);
  CHECK(hope::route_mode_from_json(j, hope::RouteMode::soft) == hope::RouteMode::hard);
  CHECK(hope::route_mode_from_json(Json::object(), hope::RouteMode::soft) == hope::RouteMode::soft);
  CHECK(hope::router_params_from_json(Json::object()).tau1 == 5.0);
  CHECK_THROWS_AS(hope::router_params_from_json(Json::parse(R"({"centers":[1,2]})")), hope::Error);
  CHECK_THROWS_AS(hope::router_params_from_json(Json::parse(R"({"tau1":9,"tau2":4})")), hope::Error);
}

TEST_CASE("scene JSON round trip is exact") {
  auto c = hope::default_config(hope::SceneType::intersection, 3);
  c.with_point_clouds = false;
  const auto sc = hope::gen_scene(c);
  hope::GhnParams params;
  params.eps_s = 2.5;
  const Json j = hope::scene_to_json(sc.scene, params);
  const auto back = hope::scene_from_json(Json::parse(j.dump()));
  REQUIRE(back.agents.size() == sc.scene.agents.size());
  for (std::size_t i = 0; i < back.agents.size(); ++i) {
    CHECK(back.agents[i].id == sc.scene.agents[i].id);
    CHECK(back.agents[i].position == sc.scene.agents[i].position);
    CHECK(back.agents[i].subspace.basis() == sc.scene.agents[i].subspace.basis());
  }
  REQUIRE(back.edges.size() == sc.scene.edges.size());
  for (std::size_t e = 0; e < back.edges.size(); ++e) CHECK(back.edges[e].members == sc.scene.edges[e].members);
  CHECK(hope::ghn_params_from_json(j.at("params")).eps_s == 2.5);
}

TEST_CASE("scene JSON rejects bad edges") {
  const Json bad = Json::parse(
      R"({"agents":[{"id":1,"position":[0,0],"subspace":{"n":2,"k":1,"basis":[1,0]}}],"edges":[[7]]})");
  CHECK_THROWS_AS(hope::scene_from_json(bad), hope::IoError);
}

TEST_CASE("scenario config and observations round trip") {
  auto c = hope::default_config(hope::SceneType::adverse, 9);
  c.frames = 4;
  c.occlusions = {{2, 1, 2}};
  const auto back = hope::scenario_config_from_json(Json::parse(hope::to_json(c).dump()));
  CHECK(back.scene_type == c.scene_type);
  CHECK(back.num_agents == c.num_agents);
  CHECK(back.noise_level == c.noise_level);
  CHECK(back.seed == c.seed);
  REQUIRE(back.occlusions.size() == 1);
  CHECK(back.occlusions[0].duration_frames == 2);

  hope::FrameObservation f;
  f.timestamp = 0.3;
  f.noise_level = 1.5;
  hope::ObservedObject o;
  o.feature = hope::Vector::LinSpaced(4, 0.0, 1.0);
  o.position = hope::Vec2(1.0, -2.0);
  f.objects = {o, o};
  f.objects[1].id_hint = 5;
  const auto fb = hope::frame_observation_from_json(Json::parse(hope::to_json(f).dump()));
  CHECK(fb.timestamp == 0.3);
  CHECK(!fb.objects[0].id_hint.has_value());
  CHECK(*fb.objects[1].id_hint == 5);
  CHECK(fb.objects[1].feature == o.feature);
}

TEST_CASE("scenario directory round trip") {
  const fs::path dir = fs::temp_directory_path() / "hope_test_scenario";
  fs::remove_all(dir);
  auto c = hope::default_config(hope::SceneType::highway, 2);
  c.frames = 3;
  const auto sc = hope::gen_scene(c);
  hope::write_scenario_dir(dir, sc);
  CHECK(fs::exists(dir / "scene.json"));
  CHECK(fs::exists(dir / "frames" / "frame_00002.hpc"));
  const auto files = hope::read_scenario_dir(dir);
  CHECK(files.config.frames == 3);
  REQUIRE(files.observations.size() == 3);
  CHECK(files.observations[1].objects.size() == sc.observations[1].objects.size());
  const auto cloud = hope::read_hpc(dir / "frames" / "frame_00000.hpc");
  REQUIRE(cloud.size() == sc.clouds[0].size());
  for (std::size_t i = 0; i < cloud.values().size(); i += 97) {
    CHECK(cloud.values()[i] == static_cast<double>(static_cast<float>(sc.clouds[0].values()[i])));
  }
}

TEST_CASE("JSON file errors are I/O errors") {
  CHECK_THROWS_AS(hope::read_json_file("/nonexistent/x.json"), hope::IoError);
  const fs::path bad = fs::temp_directory_path() / "hope_test_bad.json";
  std::ofstream(bad) << "{not json";
  CHECK_THROWS_AS(hope::read_json_file(bad), hope::IoError);
}
