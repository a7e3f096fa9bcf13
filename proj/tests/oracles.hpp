#pragma once

// Brute-force and textbook reference implementations the tests compare the
// library against. None of these call into the code under test except for
// plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "hope/ghn.hpp"
#include "hope/point_cloud.hpp"

namespace oracle {

using hope::Matrix;
using hope::Vector;

inline hope::PointCloud random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed,
                                     double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n * dim);
  for (double& x : v) {
    x = u(rng);
  }
  return hope::PointCloud(dim, std::move(v));
}

inline double dist2(const hope::PointCloud& c, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t k = 0; k < c.ambient_dim(); ++k) {
    const double d = c.point(a)[k] - c.point(b)[k];
    s += d * d;
  }
  return s;
}

struct TwoNn {
  double r1;
  double r2;
};

// O(N^2) first and second neighbor distances of every point.
inline std::vector<TwoNn> brute_two_nn(const hope::PointCloud& c) {
  std::vector<TwoNn> out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    double b1 = std::numeric_limits<double>::infinity();
    double b2 = b1;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j == i) continue;
      const double d = dist2(c, i, j);
      if (d < b1) {
        b2 = b1;
        b1 = d;
      } else if (d < b2) {
        b2 = d;
      }
    }
    out.push_back({std::sqrt(b1), std::sqrt(b2)});
  }
  return out;
}

// Censored Pareto MLE over brute-force ratios.
inline double brute_twonn_mle(const hope::PointCloud& c, double discard) {
  std::vector<double> lm;
  for (const auto& r : brute_two_nn(c)) {
    if (r.r1 > 0.0) lm.push_back(std::log(r.r2 / r.r1));
  }
  std::sort(lm.begin(), lm.end());
  const std::size_t n = lm.size();
  const auto drop = static_cast<std::size_t>(std::floor(discard * static_cast<double>(n)));
  const std::size_t m = n - drop;
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += lm[i];
  s += static_cast<double>(drop) * lm[m - 1];
  return static_cast<double>(m) / s;
}

// Random rotation via QR of a Gaussian matrix.
inline Matrix random_rotation(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  Matrix q = Eigen::HouseholderQR<Matrix>(a).householderQ();
  return q;
}

inline Matrix gaussian(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix a(rows, cols);
  for (int i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  return a;
}

// Modified Gram-Schmidt thin QR with diag(R) > 0.
struct Qr {
  Matrix q;
  Matrix r;
};
inline Qr gram_schmidt(const Matrix& m) {
  const auto n = m.rows();
  const auto k = m.cols();
  Matrix q = m;
  Matrix r = Matrix::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (int pass = 0; pass < 2; ++pass) {  // reorthogonalize once
      for (Eigen::Index i = 0; i < j; ++i) {
        const double c = q.col(i).dot(q.col(j));
        r(i, j) += c;
        q.col(j) -= c * q.col(i);
      }
    }
    r(j, j) = q.col(j).norm();
    q.col(j) /= r(j, j);
  }
  (void)n;
  return {q, r};
}

// Principal angles from the singular values of A^T B.
inline std::vector<double> principal_angles(const Matrix& a, const Matrix& b) {
  Eigen::JacobiSVD<Matrix> svd(a.transpose() * b);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    out.push_back(std::acos(std::clamp(svd.singularValues()(i), -1.0, 1.0)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Hyperedges by definition: for each agent, every agent within eps_s in the
// plane and eps_g in projection metric sqrt(k - ||Ui^T Uj||^2), itself
// included, as id sets; duplicates merged.
inline std::set<std::vector<std::int64_t>> brute_hyperedges(
    const std::vector<hope::AgentState>& agents, double eps_s, double eps_g) {
  std::set<std::vector<std::int64_t>> out;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    std::vector<std::int64_t> members;
    for (std::size_t j = 0; j < agents.size(); ++j) {
      const double ds = (agents[i].position - agents[j].position).norm();
      const Matrix& ui = agents[i].subspace.basis();
      const Matrix& uj = agents[j].subspace.basis();
      const double overlap = (ui.transpose() * uj).squaredNorm();
      const double dg = std::sqrt(std::max(0.0, static_cast<double>(ui.cols()) - overlap));
      if (i == j || (ds <= eps_s && dg <= eps_g)) {
        members.push_back(agents[j].id);
      }
    }
    std::sort(members.begin(), members.end());
    out.insert(members);
  }
  return out;
}

inline std::set<std::vector<std::int64_t>> edge_ids(const hope::HypergraphScene& s,
                                                    const std::vector<hope::Hyperedge>& edges) {
  std::set<std::vector<std::int64_t>> out;
  for (const auto& e : edges) {
    std::vector<std::int64_t> ids;
    for (int m : e.members) ids.push_back(s.agents[static_cast<std::size_t>(m)].id);
    std::sort(ids.begin(), ids.end());
    out.insert(ids);
  }
  return out;
}

// Dense softmax attention: rows of X are tokens.
inline Matrix dense_attention(const Matrix& x, const Matrix& wq, const Matrix& wk,
                              const Matrix& wv) {
  const Matrix q = x * wq;
  const Matrix k = x * wk;
  const Matrix v = x * wv;
  Matrix s = q * k.transpose() / std::sqrt(static_cast<double>(wq.cols()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    s.row(i).array() -= s.row(i).maxCoeff();
    s.row(i) = s.row(i).array().exp().matrix();
    s.row(i) /= s.row(i).sum();
  }
  return s * v;
}

}  // namespace oracle
