#include "hope/ghn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace hope {

void GhnParams::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw Error("GHN eta must be positive");
  }
  if (!(eps_s > 0.0) || !std::isfinite(eps_s)) {
    throw Error("GHN eps_s must be positive");
  }
  if (!(eps_g > 0.0) || !std::isfinite(eps_g)) {
    throw Error("GHN eps_g must be positive");
  }
  if (!(rho_max > 0.0) || !std::isfinite(rho_max)) {
    throw Error("GHN rho_max must be positive");
  }
}

namespace {

Matrix perturbed_identity(int k, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix w = Matrix::Identity(k, k);
  for (int c = 0; c < k; ++c) {
    for (int r = 0; r < k; ++r) {
      w(r, c) += 0.01 * normal(rng);
    }
  }
  return w;
}

}  // namespace

GhnParams GhnParams::with_weights(int k) const {
  GhnParams out = *this;
  if (out.phi_weights.size() == 0) {
    out.phi_weights = perturbed_identity(k, mix_seed(seed, 1));
  }
  if (out.psi_weights.size() == 0) {
    out.psi_weights = perturbed_identity(k, mix_seed(seed, 2));
  }
  if (out.phi_weights.rows() != k || out.phi_weights.cols() != k ||
      out.psi_weights.rows() != k || out.psi_weights.cols() != k) {
    throw Error("GHN weight matrices must be k x k for k = " +
                std::to_string(k));
  }
  return out;
}

namespace {

struct CellHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& c) const {
    return static_cast<std::size_t>(
        mix_seed(static_cast<std::uint64_t>(c.first),
                 static_cast<std::uint64_t>(c.second)));
  }
};

void check_agents(const std::vector<AgentState>& agents) {
  if (agents.empty()) {
    throw Error("scene has no agents");
  }
  const int n = agents.front().subspace.ambient();
  const int k = agents.front().subspace.dim();
  std::unordered_set<std::int64_t> ids;
  for (const auto& a : agents) {
    if (a.subspace.ambient() != n || a.subspace.dim() != k) {
      throw Error("agents have mixed subspace dimensions");
    }
    if (!a.position.allFinite()) {
      throw Error("agent position is not finite");
    }
    if (!ids.insert(a.id).second) {
      throw Error("duplicate agent id " + std::to_string(a.id));
    }
  }
}

}  // namespace

std::vector<Hyperedge> build_hyperedges(const std::vector<AgentState>& agents,
                                        double eps_s, double eps_g) {
  check_agents(agents);
  if (!(eps_s > 0.0) || !(eps_g > 0.0)) {
    throw Error("hyperedge thresholds must be positive");
  }
  const int count = static_cast<int>(agents.size());
  const double k = agents.front().subspace.dim();
  const double eps_s2 = eps_s * eps_s;
  const double min_overlap = k - eps_g * eps_g;

  using Cell = std::pair<std::int64_t, std::int64_t>;
  auto cell_of = [&](const Vec2& p) {
    return Cell{static_cast<std::int64_t>(std::floor(p.x() / eps_s)),
                static_cast<std::int64_t>(std::floor(p.y() / eps_s))};
  };
  std::unordered_map<Cell, std::vector<int>, CellHash> grid;
  grid.reserve(agents.size());
  for (int i = 0; i < count; ++i) {
    grid[cell_of(agents[i].position)].push_back(i);
  }

  std::vector<std::vector<int>> adjacency(agents.size());
  Matrix cross;
  for (int i = 0; i < count; ++i) {
    const Cell c = cell_of(agents[i].position);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find(Cell{c.first + dx, c.second + dy});
        if (it == grid.end()) {
          continue;
        }
        for (int j : it->second) {
          if (j <= i) {
            continue;
          }
          if ((agents[i].position - agents[j].position).squaredNorm() > eps_s2) {
            continue;
          }
          // Lower id on the left so the rounding does not depend on order.
          const bool i_first = agents[i].id < agents[j].id;
          const Matrix& left = agents[i_first ? i : j].subspace.basis();
          const Matrix& right = agents[i_first ? j : i].subspace.basis();
          cross.noalias() = left.transpose() * right;
          if (cross.squaredNorm() >= min_overlap) {
            adjacency[i].push_back(j);
            adjacency[j].push_back(i);
          }
        }
      }
    }
  }

  auto by_id = [&](int a, int b) { return agents[a].id < agents[b].id; };
  std::vector<Hyperedge> edges;
  edges.reserve(agents.size());
  for (int i = 0; i < count; ++i) {
    Hyperedge e;
    e.members = std::move(adjacency[i]);
    e.members.push_back(i);
    std::sort(e.members.begin(), e.members.end(), by_id);
    edges.push_back(std::move(e));
  }
  auto edge_less = [&](const Hyperedge& a, const Hyperedge& b) {
    return std::lexicographical_compare(a.members.begin(), a.members.end(),
                                        b.members.begin(), b.members.end(),
                                        by_id);
  };
  std::sort(edges.begin(), edges.end(), edge_less);
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Hyperedge& a, const Hyperedge& b) {
                            return a.members == b.members;
                          }),
              edges.end());
  return edges;
}

Matrix edge_message(const Hyperedge& edge, const std::vector<AgentState>& agents,
                    const Matrix& phi_weights) {
  if (edge.members.empty()) {
    throw Error("empty hyperedge");
  }
  Matrix sum = Matrix::Zero(agents.at(edge.members.front()).subspace.ambient(),
                            phi_weights.cols());
  for (int i : edge.members) {
    sum.noalias() += agents.at(i).subspace.basis() * phi_weights;
  }
  return sum / static_cast<double>(edge.members.size());
}

namespace {

constexpr int kMaxEtaHalvings = 5;

// U + eta (S - U U^T S) W_psi, retracted; S is the summed incident message.
Subspace update_from_sum(const Matrix& u, const Matrix& summed,
                         const GhnParams& params) {
  Matrix tangent = summed;
  tangent.noalias() -= u * (u.transpose() * summed);
  const Matrix step = tangent * params.psi_weights;
  double eta = params.eta;
  for (int attempt = 0; attempt <= kMaxEtaHalvings; ++attempt) {
    try {
      return qr_retract(u + eta * step);
    } catch (const Error&) {
      eta *= 0.5;
    }
  }
  throw Error("degenerate update");
}

}  // namespace

Subspace node_update(const AgentState& agent,
                     const std::vector<Matrix>& incident_messages,
                     const GhnParams& params) {
  if (incident_messages.empty()) {
    throw Error("node update needs at least one incident message");
  }
  const Matrix& u = agent.subspace.basis();
  if (params.psi_weights.rows() != u.cols() ||
      params.psi_weights.cols() != u.cols()) {
    throw Error("psi weights must be k x k");
  }
  Matrix summed = Matrix::Zero(u.rows(), u.cols());
  for (const Matrix& m : incident_messages) {
    if (m.rows() != u.rows() || m.cols() != u.cols()) {
      throw Error("message shape does not match the agent basis");
    }
    summed += m;
  }
  return update_from_sum(u, summed, params);
}

HypergraphScene run_ghn(const HypergraphScene& scene, const PathSpec& spec,
                        const GhnParams& params_in) {
  params_in.validate();
  if (spec.rounds < 0) {
    throw Error("negative round count");
  }
  if (spec.rounds == 0) {
    return scene;
  }
  check_agents(scene.agents);
  for (const auto& a : scene.agents) {
    if (a.subspace.dim() != spec.subspace_dim) {
      throw Error("agent subspace dim does not match the path");
    }
  }
  const GhnParams params = params_in.with_weights(spec.subspace_dim);
  const std::size_t count = scene.agents.size();
  const int n = scene.agents.front().subspace.ambient();
  const int k = spec.subspace_dim;

  HypergraphScene state = scene;
  std::vector<Matrix> phi(count);
  std::vector<Matrix> summed(count);
  for (int round = 0; round < spec.rounds; ++round) {
    const auto edges =
        build_hyperedges(state.agents, params.eps_s, params.eps_g);
    for (std::size_t i = 0; i < count; ++i) {
      phi[i].noalias() = state.agents[i].subspace.basis() * params.phi_weights;
      summed[i].setZero(n, k);
    }
    // Edges are in canonical order, so every agent accumulates its incident
    // messages in the same order regardless of agent order.
    Matrix message(n, k);
    for (const auto& e : edges) {
      message.setZero();
      for (int i : e.members) {
        message += phi[static_cast<std::size_t>(i)];
      }
      message /= static_cast<double>(e.members.size());
      for (int i : e.members) {
        summed[static_cast<std::size_t>(i)] += message;
      }
    }
    std::vector<AgentState> next = state.agents;
    for (std::size_t i = 0; i < count; ++i) {
      next[i].subspace =
          update_from_sum(state.agents[i].subspace.basis(), summed[i], params);
    }
    state.agents = std::move(next);
  }
  state.edges = build_hyperedges(state.agents, params.eps_s, params.eps_g);
  return state;
}

HypergraphScene redimension_scene(const HypergraphScene& scene, int k,
                                  std::uint64_t pad_seed) {
  HypergraphScene out;
  out.agents = scene.agents;
  for (auto& a : out.agents) {
    a.subspace = redimension(a.subspace, k, pad_seed);
  }
  if (!out.agents.empty()) {
    out.edges = scene.edges;
  }
  return out;
}

namespace {

// Count sketch: input coordinate c lands in one hashed output bucket with a
// hashed sign.
struct SparseProjection {
  std::vector<int> bucket;      // per input coordinate
  std::vector<double> sign;     // +-1
};

SparseProjection make_projection(int input_dim, int feat_dim,
                                 std::uint64_t seed) {
  SparseProjection p;
  p.bucket.resize(static_cast<std::size_t>(input_dim));
  p.sign.resize(p.bucket.size());
  for (std::size_t c = 0; c < p.bucket.size(); ++c) {
    const std::uint64_t h = mix_seed(seed, c);
    p.bucket[c] = static_cast<int>(h % static_cast<std::uint64_t>(feat_dim));
    p.sign[c] = (h >> 63) ? -1.0 : 1.0;
  }
  return p;
}

}  // namespace

Matrix attention_projection(int input_dim, int feat_dim, std::uint64_t seed) {
  const SparseProjection p = make_projection(input_dim, feat_dim, seed);
  Matrix dense = Matrix::Zero(input_dim, feat_dim);
  for (int c = 0; c < input_dim; ++c) {
    dense(c, p.bucket[static_cast<std::size_t>(c)]) = p.sign[static_cast<std::size_t>(c)];
  }
  return dense;
}

namespace {

// tokens (L x input) times the projection, one column update per input
// coordinate.
void project(const Matrix& tokens, const SparseProjection& p, Matrix& out) {
  out.setZero();
  for (std::size_t c = 0; c < p.bucket.size(); ++c) {
    out.col(p.bucket[c]) += p.sign[c] * tokens.col(static_cast<Eigen::Index>(c));
  }
}

constexpr Eigen::Index kQueryTile = 16;

}  // namespace

std::vector<Vector> attention_baseline(const HypergraphScene& scene,
                                       int feat_dim, std::uint64_t seed) {
  if (scene.agents.empty()) {
    throw Error("scene has no agents");
  }
  if (feat_dim < 1) {
    throw Error("attention width must be positive");
  }
  const Eigen::Index count = static_cast<Eigen::Index>(scene.agents.size());
  const int n = scene.agents.front().subspace.ambient();
  const int k = scene.agents.front().subspace.dim();

  Matrix tokens(count, n * k);
  for (Eigen::Index a = 0; a < count; ++a) {
    const Matrix& u = scene.agents[static_cast<std::size_t>(a)].subspace.basis();
    if (u.rows() != n || u.cols() != k) {
      throw Error("agents have mixed subspace dimensions");
    }
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < k; ++c) {
        tokens(a, r * k + c) = u(r, c);  // row-major flatten
      }
    }
  }

  Matrix q(count, feat_dim);
  Matrix key(count, feat_dim);
  Matrix value(count, feat_dim);
  Matrix out_cols(feat_dim, count);  // column i = output of agent i
  Matrix scores(count, kQueryTile);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(feat_dim));
  const int input_dim = n * k;
  project(tokens, make_projection(input_dim, feat_dim, mix_seed(seed, 11)), q);
  project(tokens, make_projection(input_dim, feat_dim, mix_seed(seed, 12)), key);
  project(tokens, make_projection(input_dim, feat_dim, mix_seed(seed, 13)), value);

  // Queries in fixed tiles: scores against every key, column softmax, mix
  // values.
  for (Eigen::Index start = 0; start < count; start += kQueryTile) {
    const Eigen::Index width = std::min<Eigen::Index>(kQueryTile, count - start);
    auto tile = scores.leftCols(width);
    tile.noalias() = key * q.middleRows(start, width).transpose();
    tile *= inv_sqrt_d;
    for (Eigen::Index c = 0; c < width; ++c) {
      auto col = tile.col(c);
      const double top = col.maxCoeff();
      col = (col.array() - top).exp();
      col /= col.sum();
    }
    out_cols.middleCols(start, width).noalias() = value.transpose() * tile;
  }

  std::vector<Vector> rows;
  rows.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    rows.emplace_back(out_cols.col(i));
  }
  return rows;
}

int max_hyperedge_membership(double rho_max, double eps_s) {
  if (!(rho_max > 0.0) || !(eps_s > 0.0)) {
    throw Error("membership bound needs positive arguments");
  }
  return static_cast<int>(std::ceil(rho_max * std::numbers::pi * eps_s * eps_s));
}

std::vector<int> membership_counts(const HypergraphScene& scene) {
  std::vector<int> counts(scene.agents.size(), 0);
  for (const auto& e : scene.edges) {
    for (int i : e.members) {
      ++counts.at(static_cast<std::size_t>(i));
    }
  }
  return counts;
}

double ghn_operation_count(const PathSpec& spec, int num_agents, int ambient) {
  const double k = spec.subspace_dim;
  // phi (1) + tangent projection and psi (3) + Householder QR and Q (4)
  return static_cast<double>(spec.rounds) * num_agents * 8.0 * ambient * k * k;
}

}  // namespace hope
