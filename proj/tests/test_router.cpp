#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hope/common.hpp"
#include "hope/router.hpp"

using hope::RouterParams;

namespace {

// Direct evaluation of w_j = exp(-beta|d-c_j|) / sum_m exp(-beta|d-c_m|).
hope::PathWeights direct_weights(double d, const RouterParams& p) {
  hope::PathWeights w{};
  double z = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    w[j] = std::exp(-p.beta * std::abs(d - p.centers[j]));
    z += w[j];
  }
  for (double& x : w) x /= z;
  return w;
}

}  // namespace

TEST_CASE("path table") {
  CHECK(hope::path_spec(0) == hope::PathSpec{2, 8});
  CHECK(hope::path_spec(1) == hope::PathSpec{4, 16});
  CHECK(hope::path_spec(2) == hope::PathSpec{6, 32});
  CHECK_THROWS_AS(hope::path_spec(3), hope::Error);
  CHECK(hope::parse_path_name("medium") == 1);
}

TEST_CASE("soft weights match the direct formula and sum to one") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-5.0, 25.0);
  std::uniform_real_distribution<double> b(0.1, 4.0);
  for (int i = 0; i < 200; ++i) {
    RouterParams p;
    p.beta = b(rng);
    const double x = d(rng);
    const auto w = hope::soft_weights(x, p);
    const auto want = direct_weights(x, p);
    double sum = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(w[j] == doctest::Approx(want[j]).epsilon(1e-12));
      CHECK(w[j] >= 0.0);
      sum += w[j];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("soft weights stay finite for extreme inputs") {
  RouterParams p;
  p.beta = 50.0;
  const auto w = hope::soft_weights(1e6, p);
  CHECK(w[2] == doctest::Approx(1.0));
  CHECK(std::isfinite(w[0]));
}

TEST_CASE("routing anchors and thresholds") {
  const RouterParams p;
  CHECK(hope::threshold_route(3.2, p).spec == hope::PathSpec{2, 8});
  CHECK(hope::threshold_route(14.5, p).spec == hope::PathSpec{6, 32});
  CHECK(hope::hard_route(3.2, p).selected == 0);
  CHECK(hope::hard_route(14.5, p).selected == 2);
  CHECK(hope::threshold_route(5.0, p).selected == 0);
  CHECK(hope::threshold_route(std::nextafter(5.0, 6.0), p).selected == 1);
  CHECK(hope::threshold_route(12.0, p).selected == 1);
  CHECK(hope::threshold_route(std::nextafter(12.0, 13.0), p).selected == 2);
  const auto t = hope::threshold_route(8.0, p);
  CHECK(t.weights == hope::PathWeights{0.0, 1.0, 0.0});
}

TEST_CASE("hard routing breaks ties toward the shallower path") {
  RouterParams p;
  p.centers = {4.0, 6.0, 13.0};
  CHECK(hope::hard_route(5.0, p).selected == 0);
}

TEST_CASE("soft routing reports soft weights with the argmax path") {
  const RouterParams p;
  const auto r = hope::route(7.0, p, hope::RouteMode::soft);
  CHECK(r.selected == 1);
  CHECK(r.weights[0] > 0.0);
  CHECK(r.weights[2] > 0.0);
}

TEST_CASE("routing is shift equivariant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    RouterParams p;
    const double x = u(rng) + 8.0;
    const double shift = u(rng);
    RouterParams q = p;
    for (double& c : q.centers) c += shift;
    const auto a = hope::soft_weights(x, p);
    const auto b = hope::soft_weights(x + shift, q);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(a[j] - b[j]) <= 1e-12);
  }
}

// Fourth-order central difference of w_j along a parameter perturbation.
template <typename Perturb>
hope::PathWeights numeric_derivative(Perturb perturbed_weights, double h) {
  const auto a = perturbed_weights(2 * h);
  const auto b = perturbed_weights(h);
  const auto c = perturbed_weights(-h);
  const auto d = perturbed_weights(-2 * h);
  hope::PathWeights out{};
  for (std::size_t j = 0; j < 3; ++j) {
    out[j] = (-a[j] + 8 * b[j] - 8 * c[j] + d[j]) / (12 * h);
  }
  return out;
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-2.0, 18.0);
  std::uniform_real_distribution<double> b(0.2, 3.0);
  const double h = 1e-3;
  int checked = 0;
  while (checked < 100) {
    RouterParams p;
    p.beta = b(rng);
    const double x = d(rng);
    bool near_kink = false;
    for (double c : p.centers) near_kink |= std::abs(x - c) < 0.05;
    if (near_kink) continue;
    ++checked;
    const auto g = hope::soft_weights_gradient(x, p);
    // Analytic and numeric Jacobians of w with respect to (d, beta, c0..c2).
    std::vector<double> analytic;
    std::vector<double> numeric;
    const auto nd = numeric_derivative([&](double e) { return hope::soft_weights(x + e, p); }, h);
    const auto nb = numeric_derivative(
        [&](double e) {
          RouterParams q = p;
          q.beta += e;
          return hope::soft_weights(x, q);
        },
        h);
    for (std::size_t j = 0; j < 3; ++j) {
      analytic.push_back(g.d_dhat[j]);
      numeric.push_back(nd[j]);
      analytic.push_back(g.d_beta[j]);
      numeric.push_back(nb[j]);
    }
    for (std::size_t m = 0; m < 3; ++m) {
      const auto nc = numeric_derivative(
          [&](double e) {
            RouterParams q = p;
            q.centers[m] += e;
            return hope::soft_weights(x, q);
          },
          h);
      for (std::size_t j = 0; j < 3; ++j) {
        analytic.push_back(g.d_centers[j][m]);
        numeric.push_back(nc[j]);
      }
    }
    double diff = 0.0;
    double norm_a = 0.0;
    double norm_n = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
      norm_a += analytic[i] * analytic[i];
      norm_n += numeric[i] * numeric[i];
    }
    CHECK(std::sqrt(diff) / std::max(std::sqrt(norm_a), std::sqrt(norm_n)) <= 1e-5);
  }
}

TEST_CASE("gradient is undefined at a center") {
  CHECK_THROWS_WITH_AS(hope::soft_weights_gradient(8.0, RouterParams{}),
                       "nondifferentiable point", hope::Error);
}

TEST_CASE("annealing ramps geometrically and holds") {
  const hope::AnnealSchedule s{1.0, 16.0, 4};
  CHECK(hope::anneal_beta(0, s) == doctest::Approx(1.0));
  CHECK(hope::anneal_beta(2, s) == doctest::Approx(4.0));
  CHECK(hope::anneal_beta(4, s) == doctest::Approx(16.0));
  CHECK(hope::anneal_beta(100, s) == doctest::Approx(16.0));
}

TEST_CASE("router validation") {
  RouterParams p;
  p.beta = 0.0;
  CHECK_THROWS_AS(hope::soft_weights(1.0, p), hope::Error);
  RouterParams q;
  q.tau1 = 12.0;
  q.tau2 = 5.0;
  CHECK_THROWS_AS(hope::threshold_route(1.0, q), hope::Error);
  CHECK_THROWS_WITH_AS(hope::threshold_route(std::nan(""), RouterParams{}),
                       "invalid complexity signal", hope::Error);
  CHECK_THROWS_AS(hope::parse_route_mode("fuzzy"), hope::Error);
}
