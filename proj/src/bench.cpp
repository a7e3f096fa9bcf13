#include "hope/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <concepts>
#include <fstream>
#include <numeric>
#include <random>
#include <tuple>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "hope/lid.hpp"

namespace hope {

namespace {

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <std::integral T>
std::string num(T v) {
  return std::to_string(v);
}

double median(std::vector<double> v) {
  if (v.empty()) {
    throw Error("median of an empty sample");
  }
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) {
    return hi;
  }
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

template <typename F>
double time_ns(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  const auto stop = std::chrono::steady_clock::now();
  return static_cast<double>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
}

// Large buffers stay on the heap between runs so repeated timings do not
// include the kernel zeroing fresh pages.
void pin_heap_allocations() {
#if defined(__GLIBC__)
  static const bool done = [] {
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
    return true;
  }();
  (void)done;
#endif
}

ScenarioConfig scaled_preset(SceneType type, int agents, std::uint64_t seed) {
  ScenarioConfig c = default_config(type, seed);
  if (agents > 0) {
    const double grow = std::sqrt(static_cast<double>(agents) / c.num_agents);
    c.extent_x *= grow;
    c.extent_y *= grow;
    c.num_agents = agents;
  }
  return c;
}

}  // namespace

double BenchResult::stat(const std::string& name) const {
  for (const auto& [key, value] : stats) {
    if (key == name) {
      return value;
    }
  }
  throw Error("no statistic named '" + name + "'");
}

void BenchResult::add_stat(std::string name, double value) {
  stats.emplace_back(std::move(name), value);
}

void BenchResult::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  auto write_line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out << (i ? "," : "") << cells[i];
    }
    out << '\n';
  };
  write_line(columns);
  for (const auto& r : rows) {
    write_line(r);
  }
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error("slope fit needs matching samples of size >= 2");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw Error("log-log fit needs positive values");
    }
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) {
    throw Error("slope fit needs distinct x values");
  }
  return sxy / sxx;
}

Scenario bench_scene(int agents, double density, std::uint64_t seed) {
  if (agents < 1 || !(density > 0.0)) {
    throw Error("bench scene needs agents >= 1 and a positive density");
  }
  ScenarioConfig c = default_config(SceneType::urban, seed);
  c.num_agents = agents;
  c.extent_x = c.extent_y = std::sqrt(agents / density);
  c.with_point_clouds = false;
  return gen_scene(c);
}

std::vector<ScenarioConfig> mixed_stream(int frames, double low_fraction,
                                         int agents, std::uint64_t seed) {
  if (frames < 1 || !(low_fraction >= 0.0 && low_fraction <= 1.0)) {
    throw Error("mixed stream needs frames >= 1 and a fraction in [0, 1]");
  }
  const int low = static_cast<int>(std::lround(low_fraction * frames));
  std::vector<SceneType> types(static_cast<std::size_t>(low), SceneType::highway);
  for (int i = low; i < frames; ++i) {
    types.push_back(kAllSceneTypes[1 + static_cast<std::size_t>(i - low) % 5]);
  }
  Rng rng(mix_seed(seed, 0x57));
  std::shuffle(types.begin(), types.end(), rng);
  std::vector<ScenarioConfig> out;
  for (int i = 0; i < frames; ++i) {
    out.push_back(scaled_preset(types[static_cast<std::size_t>(i)], agents,
                                mix_seed(seed, 1000 + static_cast<std::uint64_t>(i))));
  }
  return out;
}

BenchResult bench_scaling(const ScalingParams& p) {
  const auto& ls = p.agent_counts;
  if (ls.size() < 4 || !std::is_sorted(ls.begin(), ls.end()) ||
      std::adjacent_find(ls.begin(), ls.end()) != ls.end() || ls.front() < 1) {
    throw Error("agent counts must be >= 4 distinct ascending positive values");
  }
  if (p.trials < 1 || p.warmups < 0 || p.attention_width < 1 || p.stream_frames < 1 ||
      p.stream_agents < 1 || p.stream_trials < 1 || p.bootstrap_samples < 1) {
    throw Error("invalid scaling parameters");
  }
  pin_heap_allocations();

  BenchResult r;
  r.experiment = "scaling";
  r.columns = {"impl", "L", "trial", "latency_ns"};
  const GhnParams ghn_params;
  const PathSpec deep = path_spec(2);

  std::vector<std::vector<double>> att_samples;
  std::vector<std::vector<double>> ghn_samples;
  for (int L : ls) {
    const Scenario sc = bench_scene(L, p.agent_density, mix_seed(p.seed, static_cast<std::uint64_t>(L)));
    auto run_attention = [&] { attention_baseline(sc.scene, p.attention_width, p.seed); };
    auto run_deep = [&] { run_ghn(sc.scene, deep, ghn_params); };
    for (int w = 0; w < p.warmups; ++w) {
      run_attention();
      run_deep();
    }
    std::vector<double> att;
    std::vector<double> ghn;
    for (int t = 0; t < p.trials; ++t) {
      att.push_back(time_ns(run_attention));
      ghn.push_back(time_ns(run_deep));
      r.rows.push_back({"attention", num(L), num(t), num(att.back())});
      r.rows.push_back({"ghn", num(L), num(t), num(ghn.back())});
    }
    att_samples.push_back(std::move(att));
    ghn_samples.push_back(std::move(ghn));
  }

  std::vector<double> xs(ls.begin(), ls.end());
  auto medians = [](const std::vector<std::vector<double>>& s) {
    std::vector<double> m;
    for (const auto& v : s) {
      m.push_back(median(v));
    }
    return m;
  };
  const std::vector<double> att_med = medians(att_samples);
  const std::vector<double> ghn_med = medians(ghn_samples);

  Rng boot(mix_seed(p.seed, 0xb007));
  auto bootstrap = [&](const std::vector<std::vector<double>>& s) {
    std::vector<double> slopes;
    std::vector<double> resampled;
    for (int b = 0; b < p.bootstrap_samples; ++b) {
      std::vector<double> m;
      for (const auto& v : s) {
        std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
        resampled.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
          resampled.push_back(v[pick(boot)]);
        }
        m.push_back(median(resampled));
      }
      slopes.push_back(loglog_slope(xs, m));
    }
    std::sort(slopes.begin(), slopes.end());
    auto at = [&](double q) {
      return slopes[static_cast<std::size_t>(q * static_cast<double>(slopes.size() - 1))];
    };
    return std::pair{at(0.025), at(0.975)};
  };

  r.add_stat("seed", static_cast<double>(p.seed));
  r.add_stat("attention_width", p.attention_width);
  r.add_stat("exponent_attention", loglog_slope(xs, att_med));
  const auto att_ci = bootstrap(att_samples);
  r.add_stat("exponent_attention_ci_low", att_ci.first);
  r.add_stat("exponent_attention_ci_high", att_ci.second);
  r.add_stat("exponent_ghn", loglog_slope(xs, ghn_med));
  const auto ghn_ci = bootstrap(ghn_samples);
  r.add_stat("exponent_ghn_ci_low", ghn_ci.first);
  r.add_stat("exponent_ghn_ci_high", ghn_ci.second);
  r.add_stat("ratio_at_max_L", att_med.back() / ghn_med.back());
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (ls[i] == 384) {
      r.add_stat("ratio_at_384", att_med[i] / ghn_med[i]);
    }
  }

  // Adaptive stream: LID on the frame's sweep, threshold route, routed GHN;
  // against the deep path on the same frames.
  const RouterParams router;
  const auto stream = mixed_stream(p.stream_frames, p.low_fraction, p.stream_agents,
                                   mix_seed(p.seed, 0xada));
  std::vector<double> adaptive_ns;
  std::vector<double> lid_ns;
  std::vector<double> deep_ns;
  int shallow_frames = 0;
  int low_frames = 0;
  for (std::size_t f = 0; f < stream.size(); ++f) {
    const Scenario sc = gen_scene(stream[f]);
    low_frames += stream[f].scene_type == SceneType::highway ? 1 : 0;
    std::size_t path = 0;
    auto run_adaptive = [&] {
      const double d_hat = estimate_lid(sc.clouds.front()).d_hat;
      const RouteDecision decision = threshold_route(d_hat, router);
      path = decision.selected;
      run_ghn(redimension_scene(sc.scene, decision.spec.subspace_dim, p.seed),
              decision.spec, ghn_params);
    };
    auto run_lid = [&] { estimate_lid(sc.clouds.front()); };
    auto run_deep = [&] { run_ghn(sc.scene, deep, ghn_params); };
    run_adaptive();
    run_deep();
    std::vector<double> a;
    std::vector<double> l;
    std::vector<double> d;
    for (int t = 0; t < p.stream_trials; ++t) {
      a.push_back(time_ns(run_adaptive));
      l.push_back(time_ns(run_lid));
      d.push_back(time_ns(run_deep));
    }
    shallow_frames += path == 0 ? 1 : 0;
    adaptive_ns.push_back(median(a));
    lid_ns.push_back(median(l));
    deep_ns.push_back(median(d));
    const std::string L = num(stream[f].num_agents);
    r.rows.push_back({"adaptive", L, num(f), num(adaptive_ns.back())});
    r.rows.push_back({"lid", L, num(f), num(lid_ns.back())});
    r.rows.push_back({"always_deep", L, num(f), num(deep_ns.back())});
  }
  const double adaptive_mean = mean(adaptive_ns);
  const double deep_mean = mean(deep_ns);
  r.add_stat("stream_frames", static_cast<double>(stream.size()));
  r.add_stat("stream_low_fraction", static_cast<double>(low_frames) / static_cast<double>(stream.size()));
  r.add_stat("stream_shallow_fraction", static_cast<double>(shallow_frames) / static_cast<double>(stream.size()));
  r.add_stat("adaptive_mean_ns", adaptive_mean);
  r.add_stat("lid_mean_ns", mean(lid_ns));
  r.add_stat("always_deep_mean_ns", deep_mean);
  r.add_stat("adaptive_savings_pct", 100.0 * (1.0 - adaptive_mean / deep_mean));
  r.add_stat("reference_savings_pct", 38.0);
  return r;
}

BenchResult bench_lid_by_scene(int seeds, std::uint64_t base_seed) {
  if (seeds < 1) {
    throw Error("need at least one seed");
  }
  BenchResult r;
  r.experiment = "lid-by-scene";
  r.columns = {"scene_type", "seed", "d_hat", "n_used"};
  std::vector<double> means;
  for (SceneType type : kAllSceneTypes) {
    std::vector<double> values;
    for (int s = 0; s < seeds; ++s) {
      const auto seed = base_seed + static_cast<std::uint64_t>(s);
      const Scenario sc = gen_scene(default_config(type, seed));
      const LidEstimate e = estimate_lid(sc.clouds.front());
      values.push_back(e.d_hat);
      r.rows.push_back({to_string(type), num(seed), num(e.d_hat), num(e.n_used)});
    }
    const double m = mean(values);
    double var = 0.0;
    for (double v : values) {
      var += (v - m) * (v - m);
    }
    var /= values.size() > 1 ? static_cast<double>(values.size() - 1) : 1.0;
    r.add_stat("mean_" + to_string(type), m);
    r.add_stat("sd_" + to_string(type), std::sqrt(var));
    means.push_back(m);
  }
  const RouterParams router;
  const bool ordered = means[0] < means[1] && means[1] < means[2] && means[2] < means[3];
  r.add_stat("ordered", ordered ? 1.0 : 0.0);
  r.add_stat("highway_below_tau1", means[0] < router.tau1 ? 1.0 : 0.0);
  r.add_stat("construction_above_tau2", means[4] > router.tau2 ? 1.0 : 0.0);
  r.add_stat("adverse_above_tau2", means[5] > router.tau2 ? 1.0 : 0.0);
  return r;
}

Scenario occlusion_scenario(int gap, std::uint64_t seed, bool scripted) {
  if (gap < 0) {
    throw Error("occlusion gap must be non-negative");
  }
  constexpr int kLead = 20;
  constexpr int kTail = 20;
  constexpr int kOccluded = 3;
  Rng rng(mix_seed(seed, 0x0cc));
  const SceneType type =
      scripted ? SceneType::highway
               : kAllSceneTypes[std::uniform_int_distribution<std::size_t>(0, 5)(rng)];
  ScenarioConfig c = default_config(type, scripted ? 2024 : seed);
  c.with_point_clouds = false;
  std::vector<std::int64_t> ids(static_cast<std::size_t>(c.num_agents));
  std::iota(ids.begin(), ids.end(), 0);
  if (!scripted) {
    std::shuffle(ids.begin(), ids.end(), rng);
  }
  std::uniform_int_distribution<int> jitter(0, 8);
  int last_start = 0;
  for (int i = 0; i < kOccluded; ++i) {
    const int start = scripted ? kLead + 2 * i : kLead - 8 + jitter(rng);
    last_start = std::max(last_start, start);
    c.occlusions.push_back({ids[static_cast<std::size_t>(i * (scripted ? 4 : 1))], start, gap});
  }
  c.frames = last_start + gap + kTail;
  return apply_occlusions(gen_scene(c));
}

BenchResult bench_occlusion(const OcclusionParams& p) {
  if (p.gaps.empty() || p.modes.empty() || p.seeds < 1) {
    throw Error("occlusion bench needs gaps, modes and seeds");
  }
  BenchResult r;
  r.experiment = "occlusion";
  r.columns = {"suite", "gap", "mode", "seed", "events", "recovered", "occ_track"};
  auto run_suite = [&](const std::string& suite, int gap, std::uint64_t seed, bool scripted) {
    const Scenario sc = occlusion_scenario(gap, seed, scripted);
    std::vector<double> scores;
    for (MemoryMode mode : p.modes) {
      const TrackReport rep = track_sequence(sc.observations, mode, p.tracker, sc.config.occlusions);
      int recovered = 0;
      for (const auto& e : rep.events) {
        recovered += e.recovered ? 1 : 0;
      }
      r.rows.push_back({suite, num(gap), to_string(mode), num(seed), num(rep.events.size()),
                        num(recovered), num(rep.occ_track)});
      scores.push_back(rep.occ_track);
      r.add_stat(suite + "_gap" + std::to_string(gap) + "_" + to_string(mode) +
                     (scripted ? "" : "_seed" + std::to_string(seed)),
                 rep.occ_track);
    }
    return scores;
  };

  // Dominance is checked between the modes in their canonical order.
  auto dominated = [&](const std::vector<double>& s) {
    double none = -1.0;
    double stm = -1.0;
    double both = -1.0;
    for (std::size_t i = 0; i < p.modes.size(); ++i) {
      (p.modes[i] == MemoryMode::none ? none : p.modes[i] == MemoryMode::stm ? stm : both) = s[i];
    }
    const bool a = none < 0.0 || stm < 0.0 || stm >= none;
    const bool b = stm < 0.0 || both < 0.0 || both >= stm;
    const bool c = none < 0.0 || both < 0.0 || both >= none;
    return a && b && c;
  };

  int violations = 0;
  for (int gap : p.gaps) {
    violations += dominated(run_suite("scripted", gap, 0, true)) ? 0 : 1;
    for (int s = 0; s < p.seeds; ++s) {
      violations += dominated(run_suite("random", gap, p.base_seed + static_cast<std::uint64_t>(s), false)) ? 0 : 1;
    }
  }
  r.add_stat("dominance_violations", violations);
  return r;
}

double mean_projector_deviation(const HypergraphScene& a, const HypergraphScene& b) {
  if (a.agents.size() != b.agents.size() || a.agents.empty()) {
    throw Error("deviation needs two runs of the same nonempty scene");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.agents.size(); ++i) {
    const Matrix& ua = a.agents[i].subspace.basis();
    const Matrix& ub = b.agents[i].subspace.basis();
    if (ua.rows() != ub.rows()) {
      throw Error("deviation needs a common ambient dimension");
    }
    // ||P_a - P_b||_F^2 = k_a + k_b - 2 ||U_a^T U_b||_F^2
    const double overlap = (ua.transpose() * ub).squaredNorm();
    sum += std::sqrt(std::max(0.0, static_cast<double>(ua.cols() + ub.cols()) - 2.0 * overlap));
  }
  return sum / static_cast<double>(a.agents.size());
}

BenchResult bench_routing_ablation(const RoutingParams& p) {
  if (p.seeds < 1 || p.frames < 1) {
    throw Error("routing ablation needs seeds and frames");
  }
  BenchResult r;
  r.experiment = "routing";
  r.columns = {"seed", "policy", "mean_deviation", "operations"};
  const RouterParams router;
  const GhnParams ghn_params;
  const std::vector<std::string> policies = {"lid", "random", "shallow", "deep"};
  std::vector<double> totals(policies.size(), 0.0);
  std::vector<double> excess_totals(policies.size(), 0.0);
  int lid_wins = 0;
  int compute_matched = 0;
  for (int s = 0; s < p.seeds; ++s) {
    const auto seed = p.base_seed + static_cast<std::uint64_t>(s);
    const auto stream = mixed_stream(p.frames, p.low_fraction, p.agents, seed);
    // deviation[f][path]: frame f's output on `path` against its deep output.
    std::vector<std::array<double, kNumPaths>> deviation;
    std::vector<int> agents;
    std::vector<std::size_t> lid_path;
    int ambient = 0;
    for (const auto& config : stream) {
      const Scenario sc = gen_scene(config);
      const HypergraphScene reference = run_ghn(sc.scene, path_spec(2), ghn_params);
      std::array<double, kNumPaths> dev{};
      for (std::size_t path = 0; path + 1 < kNumPaths; ++path) {
        const PathSpec spec = path_spec(path);
        dev[path] = mean_projector_deviation(
            run_ghn(redimension_scene(sc.scene, spec.subspace_dim, seed), spec, ghn_params),
            reference);
      }
      deviation.push_back(dev);
      agents.push_back(config.num_agents);
      ambient = config.subspace_ambient;
      lid_path.push_back(threshold_route(estimate_lid(sc.clouds.front()).d_hat, router).selected);
    }
    std::vector<std::size_t> random_path = lid_path;
    Rng rng(mix_seed(seed, 0x7a));
    std::shuffle(random_path.begin(), random_path.end(), rng);

    // Deviation is bounded below by sqrt(k_deep - k_routed); the excess over
    // that floor is what distinguishes policies with the same path mix.
    const int deep_k = path_spec(2).subspace_dim;
    auto score = [&](auto path_of) {
      double dev = 0.0;
      double excess = 0.0;
      double ops = 0.0;
      for (std::size_t f = 0; f < deviation.size(); ++f) {
        const std::size_t path = path_of(f);
        dev += deviation[f][path];
        excess += deviation[f][path] - std::sqrt(deep_k - path_spec(path).subspace_dim);
        ops += ghn_operation_count(path_spec(path), agents[f], ambient);
      }
      const auto n = static_cast<double>(deviation.size());
      return std::tuple{dev / n, ops, excess / n};
    };
    const std::tuple<double, double, double> results[] = {
        score([&](std::size_t f) { return lid_path[f]; }),
        score([&](std::size_t f) { return random_path[f]; }),
        score([](std::size_t) { return std::size_t{0}; }),
        score([](std::size_t) { return std::size_t{2}; })};
    for (std::size_t i = 0; i < policies.size(); ++i) {
      const auto& [dev, ops, excess] = results[i];
      r.rows.push_back({num(seed), policies[i], num(dev), num(ops)});
      totals[i] += dev;
      excess_totals[i] += excess;
    }
    lid_wins += std::get<0>(results[0]) < std::get<0>(results[1]) ? 1 : 0;
    compute_matched += std::get<1>(results[0]) <= std::get<1>(results[1]) ? 1 : 0;
  }
  for (std::size_t i = 0; i < policies.size(); ++i) {
    r.add_stat("mean_deviation_" + policies[i], totals[i] / p.seeds);
    r.add_stat("mean_excess_" + policies[i], excess_totals[i] / p.seeds);
  }
  r.add_stat("lid_wins", lid_wins);
  r.add_stat("lid_compute_within_random", compute_matched);
  r.add_stat("seeds", p.seeds);
  return r;
}

}  // namespace hope
