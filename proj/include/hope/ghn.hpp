#pragma once

#include <cstdint>
#include <vector>

#include "hope/common.hpp"
#include "hope/grassmann.hpp"
#include "hope/router.hpp"

namespace hope {

struct AgentState {
  std::int64_t id = 0;
  Vec2 position = Vec2::Zero();  // meters, ground plane
  Vec2 velocity = Vec2::Zero();  // m/s
  Subspace subspace;
};

/// Member indices into the agent list, ordered by ascending agent id.
struct Hyperedge {
  std::vector<int> members;
};

struct HypergraphScene {
  std::vector<AgentState> agents;
  std::vector<Hyperedge> edges;
};

struct GhnParams {
  double eta = 0.1;
  double eps_s = 3.0;     // meters
  double eps_g = 0.8;     // projection-metric units
  double rho_max = 0.5;   // agents / m^2
  Matrix phi_weights;     // k x k; empty -> I + 0.01 N(0,1) from `seed`
  Matrix psi_weights;     // k x k; empty -> I + 0.01 N(0,1) from `seed`
  std::uint64_t seed = 7;

  void validate() const;
  /// Copy with weight matrices filled in for subspace dimension `k`.
  /// Existing weights must already be k x k.
  GhnParams with_weights(int k) const;
};

/// One candidate edge per agent i: every j within eps_s (Euclidean, ground
/// plane) and eps_g (Grassmann) of i, plus i itself; identical member sets
/// are merged. Neighbor search uses a uniform grid with cell size eps_s.
/// Edges are ordered by their member-id sequence, so the result does not
/// depend on the order of `agents`.
std::vector<Hyperedge> build_hyperedges(const std::vector<AgentState>& agents,
                                        double eps_s, double eps_g);

/// M_e = (1/|e|) sum_{i in e} U_i W_phi.
Matrix edge_message(const Hyperedge& edge, const std::vector<AgentState>& agents,
                    const Matrix& phi_weights);

/// U + eta sum_e (I - U U^T) M_e W_psi followed by QR retraction. On a
/// rank-deficient update eta is halved, up to five times, before failing
/// with "degenerate update".
Subspace node_update(const AgentState& agent,
                     const std::vector<Matrix>& incident_messages,
                     const GhnParams& params);

/// `spec.rounds` synchronous rounds of message passing; edges are rebuilt
/// from the current subspaces at the start of each round and once more at
/// the end. Every subspace must already have dim == spec.subspace_dim.
HypergraphScene run_ghn(const HypergraphScene& scene, const PathSpec& spec,
                        const GhnParams& params);

/// Re-dimension every agent's subspace to `k` (see redimension); the padding
/// columns are drawn from a single scene-wide seed.
HypergraphScene redimension_scene(const HypergraphScene& scene, int k,
                                  std::uint64_t pad_seed);

/// Dense single-head softmax attention over all L agents. Each agent is
/// featurized as flatten(U) and sent through three seeded count-sketch
/// projections (one hashed signed bucket per input coordinate) to queries,
/// keys and values of width `feat_dim` (projection seeds mix_seed(seed, 11), 12 and
/// 13 respectively). Deliberately quadratic in L.
std::vector<Vector> attention_baseline(const HypergraphScene& scene,
                                       int feat_dim, std::uint64_t seed);

/// Dense form (input_dim x feat_dim) of one sparse projection used by
/// attention_baseline; `seed` is the per-projection seed.
Matrix attention_projection(int input_dim, int feat_dim, std::uint64_t seed);

/// ceil(rho_max * pi * eps_s^2).
int max_hyperedge_membership(double rho_max, double eps_s);

/// Number of edges containing each agent.
std::vector<int> membership_counts(const HypergraphScene& scene);

/// Rough multiply-add count of run_ghn for a path on L agents in R^n;
/// used to compare compute across routing policies.
double ghn_operation_count(const PathSpec& spec, int num_agents, int ambient);

}  // namespace hope
