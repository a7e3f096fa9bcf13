#include <doctest.h>

#include <cmath>

#include "hope/grassmann.hpp"
#include "oracles.hpp"

using hope::Matrix;
using hope::Subspace;

TEST_CASE("thin QR equals Gram-Schmidt with a positive diagonal") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int n = 5 + static_cast<int>(seed % 40);
    const int k = 1 + static_cast<int>(seed % static_cast<std::uint64_t>(n));
    const Matrix m = oracle::gaussian(n, k, seed);
    const auto qr = hope::thin_qr(m);
    const auto want = oracle::gram_schmidt(m);
    REQUIRE(qr.q.rows() == n);
    REQUIRE(qr.q.cols() == k);
    CHECK((qr.q - want.q).norm() <= 1e-9);
    CHECK((qr.r - want.r).norm() <= 1e-9 * want.r.norm());
    CHECK((qr.q * qr.r - m).norm() <= 1e-12 * m.norm() * n);
    CHECK(hope::orthonormality_error(qr.q) <= 1e-12);
    for (int j = 0; j < k; ++j) {
      CHECK(qr.r(j, j) > 0.0);
      for (int i = j + 1; i < k; ++i) CHECK(qr.r(i, j) == 0.0);
    }
  }
}

TEST_CASE("qr_retract rejects rank-deficient input") {
  Matrix m = oracle::gaussian(6, 3, 1);
  m.col(2) = 2.0 * m.col(0) - m.col(1);
  CHECK_THROWS_WITH_AS(hope::qr_retract(m), "rank-deficient update", hope::Error);
  CHECK_THROWS_AS(hope::thin_qr(oracle::gaussian(2, 3, 1)), hope::Error);
}

TEST_CASE("qr_retract leaves an orthonormal basis unchanged") {
  const Subspace s = hope::random_subspace(12, 4, 3);
  CHECK((hope::qr_retract(s.basis()).basis() - s.basis()).norm() <= 1e-12);
}

TEST_CASE("principal angles equal the SVD oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 10 + static_cast<int>(seed);
    const int k = 1 + static_cast<int>(seed % 6);
    const Subspace a = hope::random_subspace(n, k, seed);
    const Subspace b = hope::random_subspace(n, k, seed + 100);
    const auto got = hope::principal_angles(a, b);
    const auto want = oracle::principal_angles(a.basis(), b.basis());
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
      CHECK(got[i] >= 0.0);
      CHECK(got[i] <= std::acos(-1.0) / 2 + 1e-12);
    }
    double sin2 = 0.0;
    for (double t : want) sin2 += std::sin(t) * std::sin(t);
    const double d = hope::grassmann_distance(a, b);
    CHECK(d == doctest::Approx(std::sqrt(sin2)).epsilon(1e-9));
    CHECK(d == doctest::Approx((a.projector() - b.projector()).norm() / std::sqrt(2.0)).epsilon(1e-9));
  }
}

TEST_CASE("distance is basis independent and zero on the same span") {
  const Subspace a = hope::random_subspace(9, 3, 5);
  const Matrix rot = oracle::random_rotation(3, 6);
  const Subspace b(a.basis() * rot);
  CHECK(hope::grassmann_distance(a, b) <= 1e-7);
  for (double t : hope::principal_angles(a, b)) CHECK(t <= 1e-7);
}

TEST_CASE("distance of orthogonal subspaces") {
  Matrix e = Matrix::Zero(4, 2);
  e(0, 0) = e(1, 1) = 1.0;
  Matrix f = Matrix::Zero(4, 2);
  f(2, 0) = f(3, 1) = 1.0;
  CHECK(hope::grassmann_distance(Subspace(e), Subspace(f)) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(hope::grassmann_distance(Subspace(e), hope::random_subspace(4, 3, 1)), hope::Error);
}

TEST_CASE("Subspace validates orthonormality") {
  CHECK_THROWS_AS(Subspace(oracle::gaussian(5, 2, 1)), hope::Error);
  CHECK_NOTHROW(Subspace(hope::random_subspace(5, 2, 1).basis()));
}

TEST_CASE("redimension keeps the span of the leading columns") {
  const Subspace s = hope::random_subspace(20, 6, 8);
  const Subspace shrunk = hope::redimension(s, 3, 1);
  CHECK((shrunk.basis() - s.basis().leftCols(3)).norm() <= 1e-12);

  const Subspace grown = hope::redimension(s, 10, 1);
  CHECK(grown.dim() == 10);
  CHECK(hope::orthonormality_error(grown.basis()) <= 1e-10);
  const Subspace lead(grown.basis().leftCols(6));
  CHECK(hope::grassmann_distance(lead, s) <= 1e-7);
  CHECK((hope::redimension(s, 10, 1).basis() - grown.basis()).norm() == 0.0);
  CHECK_THROWS_AS(hope::redimension(s, 21, 1), hope::Error);
}
