#include "hope/router.hpp"

#include <algorithm>
#include <cmath>

#include "hope/common.hpp"

namespace hope {

PathSpec path_spec(std::size_t path) {
  switch (path) {
    case 0:
      return {2, 8};
    case 1:
      return {4, 16};
    case 2:
      return {6, 32};
    default:
      throw Error("path index out of range");
  }
}

std::size_t parse_path_name(const std::string& name) {
  if (name == "shallow") return 0;
  if (name == "medium") return 1;
  if (name == "deep") return 2;
  throw Error("unknown path '" + name + "'");
}

void RouterParams::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error("router beta must be positive and finite");
  }
  for (double c : centers) {
    if (!std::isfinite(c)) {
      throw Error("router centers must be finite");
    }
  }
  if (!(tau1 < tau2)) {
    throw Error("router thresholds need tau1 < tau2");
  }
}

RouteMode parse_route_mode(const std::string& s) {
  if (s == "soft") return RouteMode::soft;
  if (s == "hard") return RouteMode::hard;
  if (s == "threshold") return RouteMode::threshold;
  throw Error("unknown route mode '" + s + "'");
}

namespace {

void check_signal(double d_hat) {
  if (!std::isfinite(d_hat)) {
    throw Error("invalid complexity signal");
  }
}

}  // namespace

PathWeights soft_weights(double d_hat, const RouterParams& params) {
  check_signal(d_hat);
  params.validate();
  PathWeights logits{};
  for (std::size_t j = 0; j < kNumPaths; ++j) {
    logits[j] = -params.beta * std::abs(d_hat - params.centers[j]);
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  PathWeights w{};
  double z = 0.0;
  for (std::size_t j = 0; j < kNumPaths; ++j) {
    w[j] = std::exp(logits[j] - top);
    z += w[j];
  }
  for (double& x : w) {
    x /= z;
  }
  return w;
}

RouteDecision hard_route(double d_hat, const RouterParams& params) {
  RouteDecision out;
  out.weights = soft_weights(d_hat, params);
  // Strict comparison keeps the lowest index on ties.
  std::size_t best = 0;
  for (std::size_t j = 1; j < kNumPaths; ++j) {
    if (out.weights[j] > out.weights[best]) {
      best = j;
    }
  }
  out.selected = best;
  out.spec = path_spec(best);
  return out;
}

RouteDecision threshold_route(double d_hat, const RouterParams& params) {
  check_signal(d_hat);
  params.validate();
  RouteDecision out;
  out.selected = d_hat <= params.tau1 ? 0 : (d_hat <= params.tau2 ? 1 : 2);
  out.weights[out.selected] = 1.0;
  out.spec = path_spec(out.selected);
  return out;
}

RouteDecision route(double d_hat, const RouterParams& params, RouteMode mode) {
  switch (mode) {
    case RouteMode::threshold:
      return threshold_route(d_hat, params);
    case RouteMode::soft:
    case RouteMode::hard:
      break;
  }
  return hard_route(d_hat, params);
}

SoftWeightsGradient soft_weights_gradient(double d_hat,
                                          const RouterParams& params) {
  const PathWeights w = soft_weights(d_hat, params);
  PathWeights sign{};
  PathWeights dist{};
  for (std::size_t j = 0; j < kNumPaths; ++j) {
    const double diff = d_hat - params.centers[j];
    if (diff == 0.0) {
      throw Error("nondifferentiable point");
    }
    sign[j] = diff > 0.0 ? 1.0 : -1.0;
    dist[j] = std::abs(diff);
  }
  double mean_sign = 0.0;
  double mean_dist = 0.0;
  for (std::size_t j = 0; j < kNumPaths; ++j) {
    mean_sign += w[j] * sign[j];
    mean_dist += w[j] * dist[j];
  }
  const double beta = params.beta;
  SoftWeightsGradient g;
  for (std::size_t j = 0; j < kNumPaths; ++j) {
    // logit_j = -beta |d - c_j|, so dlogit_j/dd = -beta s_j and
    // dlogit_m/dc_m = beta s_m; softmax Jacobian is w_j (delta_jm - w_m).
    g.d_dhat[j] = beta * w[j] * (mean_sign - sign[j]);
    g.d_beta[j] = w[j] * (mean_dist - dist[j]);
    for (std::size_t m = 0; m < kNumPaths; ++m) {
      const double delta = j == m ? 1.0 : 0.0;
      g.d_centers[j][m] = w[j] * (delta - w[m]) * beta * sign[m];
    }
  }
  return g;
}

double anneal_beta(long step, const AnnealSchedule& schedule) {
  if (!(schedule.beta0 > 0.0) || !(schedule.beta_max >= schedule.beta0) ||
      schedule.steps < 1 || step < 0) {
    throw Error("invalid annealing schedule");
  }
  const double frac = static_cast<double>(std::min(step, schedule.steps)) /
                      static_cast<double>(schedule.steps);
  return schedule.beta0 * std::pow(schedule.beta_max / schedule.beta0, frac);
}

}  // namespace hope
