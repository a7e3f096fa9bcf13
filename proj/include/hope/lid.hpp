#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hope/point_cloud.hpp"

namespace hope {

struct VoxelConfig {
  double voxel_size = 0.5;  // meters
  bool enabled = true;
};

enum class LidMethod { mle, regression };

std::string to_string(LidMethod m);
LidMethod parse_lid_method(const std::string& s);

struct LidEstimate {
  double d_hat = 0.0;
  std::size_t n_used = 0;
  LidMethod method = LidMethod::mle;
  double discard_fraction = 0.0;
};

/// First and second nearest-neighbor distances of one point.
struct NeighborRatio {
  std::size_t index = 0;  // into the cloud passed to two_nn_distances
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Replaces every occupied voxel of the xyz grid (the first three channels,
/// or all of them when the cloud has fewer) by the centroid of its members.
/// Output is ordered by voxel key and does not depend on input order.
PointCloud voxelize(const PointCloud& cloud, const VoxelConfig& config);

/// Exact 2-NN distances for every point. Points with r1 == 0 (they have a
/// duplicate) are dropped. Requires at least three distinct points.
std::vector<NeighborRatio> two_nn_distances(const PointCloud& cloud);

/// TwoNN intrinsic dimension. Both fits sort the ratios mu = r2/r1 and set
/// aside the largest `discard_fraction` of them:
///  - mle: censored Pareto maximum likelihood,
///    d = m / (sum_{i<m} ln mu_(i) + (n - m) ln mu_(m-1)),
///    which reduces to n / sum ln mu when nothing is discarded;
///  - regression: least-squares slope through the origin of -ln(1 - i/n)
///    against ln mu_(i) for the kept ratios, n counting all ratios before
///    the discard.
LidEstimate estimate_lid(const PointCloud& cloud, const VoxelConfig& voxel = {},
                         LidMethod method = LidMethod::mle,
                         double discard_fraction = 0.1);

}  // namespace hope
