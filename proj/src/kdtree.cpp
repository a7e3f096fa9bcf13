#include "hope/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace hope {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return s;
}

KdTree::KdTree(const PointCloud& cloud, std::size_t leaf_size)
    : cloud_(cloud), leaf_size_(std::max<std::size_t>(1, leaf_size)) {
  order_.resize(cloud.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!order_.empty()) {
    nodes_.reserve(2 * (order_.size() / leaf_size_ + 1));
    build(0, order_.size());
  }
}

int KdTree::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end, 0, 0.0, -1, -1});
  if (end - begin <= leaf_size_) {
    return id;
  }
  // Split on the channel of widest spread.
  const std::size_t dim = cloud_.ambient_dim();
  std::size_t best_dim = 0;
  double best_spread = -1.0;
  for (std::size_t c = 0; c < dim; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = cloud_.point(order_[i])[c];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = c;
    }
  }
  if (best_spread <= 0.0) {
    return id;  // all points coincide
  }
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     return cloud_.point(a)[best_dim] < cloud_.point(b)[best_dim];
                   });
  const double split = cloud_.point(order_[mid])[best_dim];
  nodes_[id].split_dim = best_dim;
  nodes_[id].split = split;
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

namespace {

bool closer(const Neighbor& a, const Neighbor& b) {
  return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
}

void offer(std::vector<Neighbor>& best, std::size_t k, Neighbor cand) {
  if (best.size() == k && !closer(cand, best.back())) {
    return;
  }
  auto pos = std::upper_bound(best.begin(), best.end(), cand, closer);
  best.insert(pos, cand);
  if (best.size() > k) {
    best.pop_back();
  }
}

}  // namespace

void KdTree::search(int node_id, std::span<const double> q, std::size_t self,
                    std::vector<Neighbor>& best, std::size_t k) const {
  const Node& node = nodes_[node_id];
  if (node.left < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t idx = order_[i];
      if (idx == self) {
        continue;
      }
      offer(best, k, Neighbor{idx, squared_distance(q, cloud_.point(idx))});
    }
    return;
  }
  const double diff = q[node.split_dim] - node.split;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  search(near, q, self, best, k);
  // `<=` keeps equal-distance ties on the far side reachable.
  if (best.size() < k || diff * diff <= best.back().dist2) {
    search(far, q, self, best, k);
  }
}

std::vector<Neighbor> KdTree::nearest_excluding(std::size_t self,
                                                std::size_t k) const {
  std::vector<Neighbor> best;
  best.reserve(k + 1);
  if (nodes_.empty() || k == 0) {
    return best;
  }
  search(0, cloud_.point(self), self, best, k);
  return best;
}

}  // namespace hope
