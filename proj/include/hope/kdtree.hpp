#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "hope/point_cloud.hpp"

namespace hope {

struct Neighbor {
  std::size_t index = std::numeric_limits<std::size_t>::max();
  double dist2 = std::numeric_limits<double>::infinity();
};

/// Exact Euclidean k-NN over a PointCloud. The tree references the cloud, so
/// the cloud must outlive it.
class KdTree {
 public:
  explicit KdTree(const PointCloud& cloud, std::size_t leaf_size = 12);

  /// The `k` nearest neighbors of stored point `self`, excluding `self`
  /// itself (other points at the same location are returned). Sorted by
  /// distance, ties by index.
  std::vector<Neighbor> nearest_excluding(std::size_t self, std::size_t k) const;

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t split_dim = 0;
    double split = 0.0;
    int left = -1;
    int right = -1;
  };

  int build(std::size_t begin, std::size_t end);
  void search(int node, std::span<const double> q, std::size_t self,
              std::vector<Neighbor>& best, std::size_t k) const;

  const PointCloud& cloud_;
  std::size_t leaf_size_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

/// Squared Euclidean distance, summed channel by channel in index order.
double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace hope
