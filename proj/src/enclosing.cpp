// Minimal enclosing balls by randomized move-to-front recursion.

#include <algorithm>
#include <cmath>
#include <list>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "parallax/geomfit.hpp"

namespace parallax {
namespace {

template <int D>
class MoveToFrontBall {
 public:
  using Vec = Eigen::Matrix<double, D, 1>;

  struct Ball {
    Vec center = Vec::Zero();
    double radius = -1.0;  // empty ball
  };

  MoveToFrontBall(std::span<const Vec> points, std::uint64_t seed) : points_(points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng() % i]);
    }
    order_.assign(order.begin(), order.end());

    Vec lo = Vec::Zero(), hi = Vec::Zero();
    if (!points.empty()) {
      lo = hi = points[0];
      for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
    }
    const double diameter = (hi - lo).norm();
    slack_sq_ = 1e-24 * diameter * diameter;
  }

  Ball solve() {
    std::vector<Vec> support;
    support.reserve(D + 1);
    Ball ball = recurse(order_.end(), support);
    // Report the radius that actually covers every point.
    double r2 = 0.0;
    for (const auto& p : points_) r2 = std::max(r2, (p - ball.center).squaredNorm());
    ball.radius = std::sqrt(r2);
    return ball;
  }

 private:
  using Iter = std::list<std::size_t>::iterator;

  bool contains(const Ball& ball, const Vec& p) const {
    if (ball.radius < 0.0) return false;
    const double r2 = ball.radius * ball.radius;
    return (p - ball.center).squaredNorm() <= r2 * (1.0 + 1e-12) + slack_sq_;
  }

  // Smallest ball with every support point on its boundary: center in the
  // affine hull, least-norm solution when the support is degenerate.
  static Ball from_support(const std::vector<Vec>& support) {
    Ball ball;
    if (support.empty()) return ball;
    const Vec& origin = support.front();
    const std::size_t k = support.size() - 1;
    if (k == 0) {
      ball.center = origin;
      ball.radius = 0.0;
      return ball;
    }
    Eigen::Matrix<double, D, Eigen::Dynamic> edges(D, static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) edges.col(static_cast<Eigen::Index>(i)) = support[i + 1] - origin;
    const Eigen::MatrixXd gram = edges.transpose() * edges;
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k); ++i) rhs[i] = 0.5 * gram(i, i);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
    cod.setThreshold(1e-12);
    const Eigen::VectorXd lambda = cod.solve(rhs);
    ball.center = origin + edges * lambda;
    double r2 = 0.0;
    for (const auto& p : support) r2 = std::max(r2, (p - ball.center).squaredNorm());
    ball.radius = std::sqrt(r2);
    return ball;
  }

  Ball recurse(Iter end, std::vector<Vec>& support) {
    Ball ball = from_support(support);
    if (support.size() == D + 1) return ball;
    for (Iter it = order_.begin(); it != end;) {
      Iter current = it++;
      const Vec& p = points_[*current];
      if (contains(ball, p)) continue;
      support.push_back(p);
      ball = recurse(current, support);
      support.pop_back();
      order_.splice(order_.begin(), order_, current);
    }
    return ball;
  }

  std::span<const Vec> points_;
  std::list<std::size_t> order_;
  double slack_sq_ = 0.0;
};

}  // namespace

Sphere minimal_enclosing_sphere(std::span<const Eigen::Vector3d> points, std::uint64_t seed) {
  if (points.empty()) return {};
  MoveToFrontBall<3> solver(points, seed);
  const auto ball = solver.solve();
  return {ball.center, ball.radius};
}

Circle2 minimal_enclosing_circle(std::span<const Eigen::Vector2d> points, std::uint64_t seed) {
  if (points.empty()) return {};
  MoveToFrontBall<2> solver(points, seed);
  const auto ball = solver.solve();
  return {ball.center, ball.radius};
}

Sphere fit_sphere(const PointCloud& cloud, std::uint64_t seed) {
  if (cloud.empty()) return {};
  const auto& points = cloud.points;
  if (points.size() <= kSphereSampleLimit) return minimal_enclosing_sphere(points, seed);

  // Seeded uniform subsample, then fold in any point left outside until the
  // ball covers the whole cloud; the result is the exact enclosing ball.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < kSphereSampleLimit; ++i) {
    std::swap(order[i], order[i + rng() % (order.size() - i)]);
  }
  std::vector<Eigen::Vector3d> sample;
  sample.reserve(kSphereSampleLimit);
  for (std::size_t i = 0; i < kSphereSampleLimit; ++i) sample.push_back(points[order[i]]);

  for (int round = 0;; ++round) {
    const Sphere ball = minimal_enclosing_sphere(sample, seed + static_cast<std::uint64_t>(round));
    std::vector<Eigen::Vector3d> outside;
    const double limit = ball.radius * (1.0 + 1e-12);
    for (const auto& p : points)
      if ((p - ball.center).norm() > limit) outside.push_back(p);
    if (outside.empty()) return ball;
    sample.insert(sample.end(), outside.begin(), outside.end());
  }
}

}  // namespace parallax
