#include "hope/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>

namespace hope {

namespace {

constexpr double kOrthoTolerance = 1e-6;
constexpr double kRankTolerance = 1e-10;

void check_same_shape(const Subspace& a, const Subspace& b) {
  if (a.ambient() != b.ambient() || a.dim() != b.dim()) {
    throw Error("subspace dimension mismatch");
  }
}

}  // namespace

double orthonormality_error(const Matrix& u) {
  const Matrix gram = u.transpose() * u;
  return (gram - Matrix::Identity(u.cols(), u.cols())).norm();
}

Subspace::Subspace(Matrix basis) : basis_(std::move(basis)) {
  if (basis_.cols() == 0 || basis_.cols() > basis_.rows()) {
    throw Error("subspace needs 0 < k <= n");
  }
  if (!basis_.allFinite()) {
    throw Error("subspace basis has non-finite entries");
  }
  if (orthonormality_error(basis_) > kOrthoTolerance) {
    throw Error("subspace basis is not orthonormal");
  }
}

Subspace Subspace::trusted(Matrix basis) {
  Subspace s;
  s.basis_ = std::move(basis);
  return s;
}

ThinQr thin_qr(const Matrix& m) {
  const Eigen::Index n = m.rows();
  const Eigen::Index k = m.cols();
  if (k == 0 || k > n) {
    throw Error("thin QR needs 0 < cols <= rows");
  }
  Matrix a = m;
  Matrix v = Matrix::Zero(n, k);
  Vector scale = Vector::Zero(k);
  Matrix r = Matrix::Zero(k, k);
  Eigen::RowVectorXd w(k);

  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index len = n - j;
    auto x = a.col(j).tail(len);
    const double norm = x.norm();
    if (norm == 0.0) {
      continue;  // nothing to reflect; R_jj = 0
    }
    const double alpha = x(0) >= 0.0 ? -norm : norm;
    auto vj = v.col(j).tail(len);
    vj = x;
    vj(0) -= alpha;
    const double vnorm2 = vj.squaredNorm();
    scale(j) = 2.0 / vnorm2;
    auto trailing = a.bottomRightCorner(len, k - j);
    w.head(k - j).noalias() = vj.transpose() * trailing;
    trailing.noalias() -= (scale(j) * vj) * w.head(k - j);
  }
  r = a.topRows(k).triangularView<Eigen::Upper>();

  Matrix q = Matrix::Identity(n, k);
  for (Eigen::Index j = k - 1; j >= 0; --j) {
    if (scale(j) == 0.0) {
      continue;
    }
    const Eigen::Index len = n - j;
    auto vj = v.col(j).tail(len);
    auto block = q.bottomRightCorner(len, k - j);
    w.head(k - j).noalias() = vj.transpose() * block;
    block.noalias() -= (scale(j) * vj) * w.head(k - j);
  }

  for (Eigen::Index j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) {
      q.col(j) *= -1.0;
      r.row(j) *= -1.0;
    }
  }
  return {std::move(q), std::move(r)};
}

Subspace qr_retract(const Matrix& m) {
  if (!m.allFinite()) {
    throw Error("rank-deficient update");
  }
  ThinQr qr = thin_qr(m);
  for (Eigen::Index j = 0; j < qr.r.rows(); ++j) {
    if (std::abs(qr.r(j, j)) <= kRankTolerance) {
      throw Error("rank-deficient update");
    }
  }
  return Subspace::trusted(std::move(qr.q));
}

std::vector<double> principal_angles(const Subspace& a, const Subspace& b) {
  check_same_shape(a, b);
  const Matrix cross = a.basis().transpose() * b.basis();
  Eigen::JacobiSVD<Matrix> svd(cross);
  const Vector& sigma = svd.singularValues();
  std::vector<double> angles;
  angles.reserve(static_cast<std::size_t>(sigma.size()));
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    angles.push_back(std::acos(std::clamp(sigma(i), 0.0, 1.0)));
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

double grassmann_distance(const Subspace& a, const Subspace& b) {
  check_same_shape(a, b);
  // sum sin^2 = k - sum cos^2 = k - ||A^T B||_F^2
  const double overlap = (a.basis().transpose() * b.basis()).squaredNorm();
  return std::sqrt(std::max(0.0, static_cast<double>(a.dim()) - overlap));
}

namespace {

Matrix normal_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      m(r, c) = normal(rng);
    }
  }
  return m;
}

}  // namespace

Subspace random_subspace(int n, int k, std::uint64_t seed) {
  if (k < 1 || n < 1 || k > n) {
    throw Error("random_subspace needs 1 <= k <= n");
  }
  return qr_retract(normal_matrix(n, k, seed));
}

Subspace redimension(const Subspace& s, int k, std::uint64_t pad_seed) {
  const int n = s.ambient();
  if (k < 1 || k > n) {
    throw Error("redimension needs 1 <= k <= n");
  }
  if (k == s.dim()) {
    return s;
  }
  if (k < s.dim()) {
    return qr_retract(s.basis().leftCols(k));
  }
  Matrix m(n, k);
  m.leftCols(s.dim()) = s.basis();
  m.rightCols(k - s.dim()) = normal_matrix(n, k - s.dim(), pad_seed);
  return qr_retract(m);
}

}  // namespace hope
