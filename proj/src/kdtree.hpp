#pragma once

#include <algorithm>
#include <cstddef>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace parallax::detail {

// Static 3D kd-tree over borrowed points, used for k-nearest-neighbor queries.
class KdTree {
 public:
  explicit KdTree(std::span<const Eigen::Vector3d> points) : points_(points) {
    index_.resize(points.size());
    for (std::size_t i = 0; i < index_.size(); ++i) index_[i] = i;
    nodes_.reserve(2 * points.size() / kLeafSize + 2);
    if (!points.empty()) build(0, points.size());
  }

  // Squared distances of the k nearest points to points_[query], excluding
  // the query index itself, ascending.
  std::vector<double> knn_squared(std::size_t query, std::size_t k) const {
    Heap heap;
    if (!nodes_.empty() && k > 0) search(0, points_[query], query, k, heap);
    std::vector<double> out;
    out.reserve(heap.size());
    while (!heap.empty()) {
      out.push_back(heap.top());
      heap.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr std::size_t kLeafSize = 12;
  using Heap = std::priority_queue<double>;

  struct Node {
    std::size_t begin = 0, end = 0;
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    std::size_t left = 0, right = 0;
  };

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({begin, end});
    if (end - begin <= kLeafSize) return id;

    Eigen::Vector3d lo = points_[index_[begin]], hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      lo = lo.cwiseMin(points_[index_[i]]);
      hi = hi.cwiseMax(points_[index_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(index_.begin() + static_cast<std::ptrdiff_t>(begin),
                     index_.begin() + static_cast<std::ptrdiff_t>(mid),
                     index_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
    const double split = points_[index_[mid]][axis];
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search(std::size_t node_id, const Eigen::Vector3d& q, std::size_t self, std::size_t k,
              Heap& heap) const {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t idx = index_[i];
        if (idx == self) continue;
        const double d2 = (points_[idx] - q).squaredNorm();
        if (heap.size() < k) {
          heap.push(d2);
        } else if (d2 < heap.top()) {
          heap.pop();
          heap.push(d2);
        }
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const std::size_t near = diff < 0.0 ? node.left : node.right;
    const std::size_t far = diff < 0.0 ? node.right : node.left;
    search(near, q, self, k, heap);
    if (heap.size() < k || diff * diff <= heap.top()) search(far, q, self, k, heap);
  }

  std::span<const Eigen::Vector3d> points_;
  std::vector<std::size_t> index_;
  std::vector<Node> nodes_;
};

}  // namespace parallax::detail
