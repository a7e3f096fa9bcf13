#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace hope {

inline constexpr std::size_t kNumPaths = 3;

using PathWeights = std::array<double, kNumPaths>;

/// GHN depth and subspace dimension for one processing path.
struct PathSpec {
  int rounds = 2;
  int subspace_dim = 8;

  friend bool operator==(const PathSpec&, const PathSpec&) = default;
};

/// Fixed table: 0 shallow (2, 8), 1 medium (4, 16), 2 deep (6, 32).
PathSpec path_spec(std::size_t path);
std::size_t parse_path_name(const std::string& name);  // shallow|medium|deep

struct RouterParams {
  PathWeights centers{3.0, 8.0, 13.0};
  double beta = 1.0;
  double tau1 = 5.0;
  double tau2 = 12.0;

  /// Throws unless beta > 0, centers finite and tau1 < tau2.
  void validate() const;
};

struct RouteDecision {
  PathWeights weights{};
  std::size_t selected = 0;
  PathSpec spec;
};

enum class RouteMode { soft, hard, threshold };
RouteMode parse_route_mode(const std::string& s);

/// w_j = exp(-beta |d - c_j|) / sum_m exp(-beta |d - c_m|).
PathWeights soft_weights(double d_hat, const RouterParams& params);

/// Argmax of the soft weights, ties to the shallower path.
RouteDecision hard_route(double d_hat, const RouterParams& params);

/// d <= tau1 -> 0, tau1 < d <= tau2 -> 1, else 2; one-hot weights.
RouteDecision threshold_route(double d_hat, const RouterParams& params);

/// Soft mode reports the soft weights together with the argmax path.
RouteDecision route(double d_hat, const RouterParams& params, RouteMode mode);

struct SoftWeightsGradient {
  PathWeights d_dhat{};                                // dw_j / dd
  std::array<PathWeights, kNumPaths> d_centers{};      // [j][m] = dw_j / dc_m
  PathWeights d_beta{};                                // dw_j / dbeta
};

/// Analytic gradient of soft_weights. This is the backward pass of the
/// straight-through estimator whose forward pass is the hard one-hot route.
/// Undefined (throws) where d_hat equals a center.
SoftWeightsGradient soft_weights_gradient(double d_hat,
                                          const RouterParams& params);

struct AnnealSchedule {
  double beta0 = 1.0;
  double beta_max = 10.0;
  long steps = 1000;
};

/// Exponential ramp beta0 -> beta_max over `steps`, then held.
double anneal_beta(long step, const AnnealSchedule& schedule);

}  // namespace hope
