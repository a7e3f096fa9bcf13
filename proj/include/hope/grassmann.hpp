#pragma once

#include <cstdint>
#include <vector>

#include "hope/common.hpp"

namespace hope {

/// A point of Gr(k, R^n), held as an n x k basis with orthonormal columns.
class Subspace {
 public:
  Subspace() = default;
  /// Validates ||U^T U - I||_F <= 1e-6 and finiteness.
  explicit Subspace(Matrix basis);

  /// Skips validation; for bases that come straight out of qr_retract.
  static Subspace trusted(Matrix basis);

  int ambient() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const { return basis_; }
  Matrix projector() const { return basis_ * basis_.transpose(); }

 private:
  Matrix basis_;
};

/// ||U^T U - I||_F.
double orthonormality_error(const Matrix& u);

/// Thin Householder QR, M = QR with Q n x k and R k x k upper triangular,
/// normalized so that diag(R) > 0.
struct ThinQr {
  Matrix q;
  Matrix r;
};
ThinQr thin_qr(const Matrix& m);

/// Q factor of the thin QR of `m` (positive-diagonal convention). Throws
/// "rank-deficient update" when some |R_jj| <= 1e-10.
Subspace qr_retract(const Matrix& m);

/// Principal angles in [0, pi/2], ascending.
std::vector<double> principal_angles(const Subspace& a, const Subspace& b);

/// Projection metric sqrt(sum sin^2 theta_i) = ||P_A - P_B||_F / sqrt(2).
double grassmann_distance(const Subspace& a, const Subspace& b);

/// qr_retract of an n x k standard-normal matrix drawn from `seed`.
Subspace random_subspace(int n, int k, std::uint64_t seed);

/// Changes k: truncation keeps the leading columns; growth appends columns
/// drawn from `pad_seed` and re-orthonormalizes. The original span is kept
/// as the span of the leading columns either way.
Subspace redimension(const Subspace& s, int k, std::uint64_t pad_seed);

}  // namespace hope
