#include "hope/lid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "hope/kdtree.hpp"

namespace hope {

std::string to_string(LidMethod m) {
  return m == LidMethod::mle ? "mle" : "regression";
}

LidMethod parse_lid_method(const std::string& s) {
  if (s == "mle") {
    return LidMethod::mle;
  }
  if (s == "regress" || s == "regression") {
    return LidMethod::regression;
  }
  throw Error("unknown LID method '" + s + "'");
}

PointCloud voxelize(const PointCloud& cloud, const VoxelConfig& config) {
  if (cloud.empty()) {
    throw Error("empty input");
  }
  if (!(config.voxel_size > 0.0)) {
    throw Error("voxel size must be positive");
  }
  const std::size_t dim = cloud.ambient_dim();
  const std::size_t spatial = std::min<std::size_t>(3, dim);

  using Key = std::array<std::int64_t, 3>;
  std::vector<Key> keys(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    Key k{0, 0, 0};
    for (std::size_t c = 0; c < spatial; ++c) {
      k[c] = static_cast<std::int64_t>(std::floor(p[c] / config.voxel_size));
    }
    keys[i] = k;
  }
  // Sort by key, then lexicographically by coordinates, so each centroid is
  // summed in an order that does not depend on the input order.
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) {
      return keys[a] < keys[b];
    }
    const auto pa = cloud.point(a);
    const auto pb = cloud.point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(),
                                        pb.end());
  });

  std::vector<double> out;
  std::vector<double> acc(dim);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::fill(acc.begin(), acc.end(), 0.0);
    while (j < order.size() && keys[order[j]] == keys[order[i]]) {
      const auto p = cloud.point(order[j]);
      for (std::size_t c = 0; c < dim; ++c) {
        acc[c] += p[c];
      }
      ++j;
    }
    const double count = static_cast<double>(j - i);
    for (std::size_t c = 0; c < dim; ++c) {
      out.push_back(acc[c] / count);
    }
    i = j;
  }
  return PointCloud(dim, std::move(out));
}

namespace {

std::size_t count_distinct(const PointCloud& cloud) {
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    const auto pa = cloud.point(a);
    const auto pb = cloud.point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(),
                                        pb.end());
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (less(order[i - 1], order[i])) {
      ++distinct;
    }
  }
  return distinct;
}

}  // namespace

std::vector<NeighborRatio> two_nn_distances(const PointCloud& cloud) {
  if (cloud.size() < 3 || count_distinct(cloud) < 3) {
    throw Error("insufficient points");
  }
  const KdTree tree(cloud);
  std::vector<NeighborRatio> out;
  out.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto nn = tree.nearest_excluding(i, 2);
    const double r1 = std::sqrt(nn[0].dist2);
    const double r2 = std::sqrt(nn[1].dist2);
    if (r1 == 0.0) {
      continue;
    }
    out.push_back(NeighborRatio{i, r1, r2});
  }
  return out;
}

LidEstimate estimate_lid(const PointCloud& cloud, const VoxelConfig& voxel,
                         LidMethod method, double discard_fraction) {
  if (cloud.empty()) {
    throw Error("empty input");
  }
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0)) {
    throw Error("discard fraction must lie in [0, 1)");
  }
  const PointCloud reduced = voxel.enabled ? voxelize(cloud, voxel) : cloud;
  const auto ratios = two_nn_distances(reduced);

  std::vector<double> log_mu;
  log_mu.reserve(ratios.size());
  for (const auto& r : ratios) {
    log_mu.push_back(std::log(r.r2 / r.r1));
  }
  std::sort(log_mu.begin(), log_mu.end());

  const std::size_t n = log_mu.size();
  const auto dropped = static_cast<std::size_t>(
      std::floor(discard_fraction * static_cast<double>(n)));
  const std::size_t m = n - dropped;
  if (m == 0 || log_mu[m - 1] <= 0.0) {
    throw Error("degenerate ratios");
  }

  double d_hat = 0.0;
  if (method == LidMethod::mle) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      sum += log_mu[i];
    }
    sum += static_cast<double>(dropped) * log_mu[m - 1];
    d_hat = static_cast<double>(m) / sum;
  } else {
    double sxy = 0.0;
    double sxx = 0.0;
    // F = 1 at i + 1 == n has no finite image; it only arises with no discard.
    const std::size_t fit = std::min(m, n - 1);
    for (std::size_t i = 0; i < fit; ++i) {
      const double x = log_mu[i];
      const double y = -std::log(1.0 - static_cast<double>(i + 1) /
                                           static_cast<double>(n));
      sxy += x * y;
      sxx += x * x;
    }
    d_hat = sxy / sxx;
  }
  if (!(d_hat > 0.0) || !std::isfinite(d_hat)) {
    throw Error("degenerate ratios");
  }
  return LidEstimate{d_hat, m, method, discard_fraction};
}

}  // namespace hope
