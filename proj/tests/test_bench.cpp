#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include "hope/bench.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

TEST_CASE("log-log slope recovers a power law") {
  const std::vector<double> x{32, 64, 128, 256, 384, 512};
  for (double p : {0.5, 1.0, 2.0, 2.7}) {
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::pow(v, p));
    CHECK(hope::loglog_slope(x, y) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(hope::loglog_slope({1.0}, {1.0}), hope::Error);
  CHECK_THROWS_AS(hope::loglog_slope({1.0, 2.0}, {1.0, -1.0}), hope::Error);
  CHECK_THROWS_AS(hope::loglog_slope({2.0, 2.0}, {1.0, 3.0}), hope::Error);
}

TEST_CASE("BenchResult writes its table and looks up statistics") {
  hope::BenchResult r;
  r.columns = {"a", "b"};
  r.rows = {{"1", "x"}, {"2", "y"}};
  r.add_stat("mean", 1.5);
  CHECK(r.stat("mean") == 1.5);
  CHECK_THROWS_AS(r.stat("median"), hope::Error);
  const fs::path path = fs::temp_directory_path() / "hope_test_bench.csv";
  r.write_csv(path);
  std::ifstream in(path);
  std::string all((std::istreambuf_iterator<char>(in)), {});
  CHECK(all == "a,b\n1,x\n2,y\n");
  CHECK_THROWS_AS(r.write_csv("/nonexistent/dir/x.csv"), hope::IoError);
}

TEST_CASE("mixed stream has the exact low-complexity share") {
  const auto stream = hope::mixed_stream(100, 0.61, 0, 3);
  REQUIRE(stream.size() == 100);
  std::map<hope::SceneType, int> counts;
  for (const auto& c : stream) ++counts[c.scene_type];
  CHECK(counts[hope::SceneType::highway] == 61);
  for (hope::SceneType t : hope::kAllSceneTypes) CHECK(counts[t] >= 7);
  const auto again = hope::mixed_stream(100, 0.61, 0, 3);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(again[i].scene_type == stream[i].scene_type);
    CHECK(again[i].seed == stream[i].seed);
  }
  const auto scaled = hope::mixed_stream(10, 0.5, 200, 1);
  for (const auto& c : scaled) {
    CHECK(c.num_agents == 200);
    CHECK_NOTHROW(hope::gen_scene(c));
  }
  CHECK_THROWS_AS(hope::mixed_stream(10, 1.5, 0, 1), hope::Error);
}

TEST_CASE("bench scenes hold density fixed as L grows") {
  for (int L : {32, 128, 512}) {
    const auto sc = hope::bench_scene(L, 0.02, 1);
    CHECK(static_cast<int>(sc.scene.agents.size()) == L);
    CHECK(sc.config.extent_x * sc.config.extent_y == doctest::Approx(L / 0.02));
    CHECK(sc.clouds.empty());
  }
}

TEST_CASE("scaling rejects bad agent lists") {
  hope::ScalingParams p;
  p.agent_counts = {32, 64, 128};
  CHECK_THROWS_AS(hope::bench_scaling(p), hope::Error);
  p.agent_counts = {64, 32, 128, 256};
  CHECK_THROWS_AS(hope::bench_scaling(p), hope::Error);
}

TEST_CASE("small scaling run emits the documented columns") {
  hope::ScalingParams p;
  p.agent_counts = {8, 16, 24, 32};
  p.trials = 2;
  p.warmups = 0;
  p.attention_width = 256;
  p.stream_frames = 4;
  p.stream_agents = 12;
  p.stream_trials = 1;
  p.bootstrap_samples = 20;
  const auto r = hope::bench_scaling(p);
  CHECK(r.columns == std::vector<std::string>{"impl", "L", "trial", "latency_ns"});
  CHECK(r.rows.size() == 4 * 2 * 2 + 4 * 3);
  CHECK(r.stat("exponent_attention_ci_low") <= r.stat("exponent_attention_ci_high"));
  CHECK(r.stat("stream_frames") == 4);
}

TEST_CASE("projector deviation equals the direct Frobenius norm") {
  hope::HypergraphScene a;
  hope::HypergraphScene b;
  double want = 0.0;
  for (int i = 0; i < 4; ++i) {
    hope::AgentState s;
    s.id = i;
    s.subspace = hope::random_subspace(12, 3, static_cast<std::uint64_t>(i));
    a.agents.push_back(s);
    s.subspace = hope::random_subspace(12, 5, static_cast<std::uint64_t>(i + 10));
    b.agents.push_back(s);
    want += (a.agents.back().subspace.projector() - s.subspace.projector()).norm();
  }
  CHECK(hope::mean_projector_deviation(a, b) == doctest::Approx(want / 4).epsilon(1e-10));
  CHECK(hope::mean_projector_deviation(a, a) <= 1e-6);
}

TEST_CASE("lid-by-scene replays bit-exactly") {
  const auto a = hope::bench_lid_by_scene(2, 7);
  const auto b = hope::bench_lid_by_scene(2, 7);
  CHECK(a.rows == b.rows);
  CHECK(a.rows.size() == 12);
  CHECK(a.rows.front()[1] == "7");
  CHECK_THROWS_AS(hope::bench_lid_by_scene(0), hope::Error);
}

TEST_CASE("occlusion suites replay and script the requested gap") {
  const auto sc = hope::occlusion_scenario(40, 0, true);
  REQUIRE(sc.config.occlusions.size() == 3);
  for (const auto& w : sc.config.occlusions) CHECK(w.duration_frames == 40);
  hope::OcclusionParams p;
  p.seeds = 2;
  const auto a = hope::bench_occlusion(p);
  const auto b = hope::bench_occlusion(p);
  CHECK(a.rows == b.rows);
  CHECK(a.rows.size() == 2 * 3 * 3);
}

TEST_CASE("routing ablation: random matches lid compute; deep is the reference") {
  hope::RoutingParams p;
  p.seeds = 1;
  p.frames = 12;
  const auto r = hope::bench_routing_ablation(p);
  std::map<std::string, std::vector<std::string>> by_policy;
  for (const auto& row : r.rows) by_policy[row[1]] = row;
  CHECK(by_policy.at("lid")[3] == by_policy.at("random")[3]);
  CHECK(std::stod(by_policy.at("deep")[2]) == 0.0);
  CHECK(std::stod(by_policy.at("shallow")[2]) >= std::stod(by_policy.at("lid")[2]));
  CHECK(std::stod(by_policy.at("shallow")[3]) <= std::stod(by_policy.at("lid")[3]));
  CHECK(r.rows == hope::bench_routing_ablation(p).rows);
}
