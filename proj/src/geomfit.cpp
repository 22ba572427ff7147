#include "parallax/geomfit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "kdtree.hpp"
#include "parallax/error.hpp"

namespace parallax {
namespace {

// Unit vector orthogonal to `n`, chosen deterministically.
Eigen::Vector3d any_perpendicular(const Eigen::Vector3d& n) {
  const Eigen::Vector3d helper =
      std::abs(n.x()) <= std::abs(n.y()) && std::abs(n.x()) <= std::abs(n.z()) ? Eigen::Vector3d::UnitX()
      : std::abs(n.y()) <= std::abs(n.z())                                     ? Eigen::Vector3d::UnitY()
                                                                               : Eigen::Vector3d::UnitZ();
  return n.cross(helper).normalized();
}

double median_z(std::span<const Eigen::Vector3d> points) {
  std::vector<double> z(points.size());
  std::transform(points.begin(), points.end(), z.begin(), [](const auto& p) { return p.z(); });
  auto mid = z.begin() + static_cast<std::ptrdiff_t>(z.size() / 2);
  std::nth_element(z.begin(), mid, z.end());
  return *mid;
}

Eigen::Vector3d mean_of(std::span<const Eigen::Vector3d> points) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

}  // namespace

Eigen::Vector3d canonical_sign(const Eigen::Vector3d& v) {
  Eigen::Index i = 0;
  v.cwiseAbs().maxCoeff(&i);
  return v[i] < 0.0 ? Eigen::Vector3d(-v) : v;
}

PrincipalAxes principal_axes(std::span<const Eigen::Vector3d> points) {
  PrincipalAxes result;
  if (points.empty()) return result;
  result.mean = mean_of(points);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d c = p - result.mean;
    cov += c * c.transpose();
  }
  cov /= static_cast<double>(points.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  for (int i = 0; i < 3; ++i) {
    result.variances[i] = eig.eigenvalues()[2 - i];
    result.axes.col(i) = canonical_sign(eig.eigenvectors().col(2 - i));
  }
  return result;
}

CleanResult clean_pointcloud(const PointCloud& cloud, int k, double sigma_mult) {
  CleanResult result;
  const std::size_t n = cloud.size();
  if (n < 2 || k < 1) {
    result.cloud = cloud;
    return result;
  }
  const std::size_t neighbors = std::min<std::size_t>(static_cast<std::size_t>(k), n - 1);
  detail::KdTree tree(cloud.points);

  std::vector<double> mean_dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto d2 = tree.knn_squared(i, neighbors);
    double sum = 0.0;
    for (double v : d2) sum += std::sqrt(v);
    mean_dist[i] = sum / static_cast<double>(d2.size());
  }
  const double mu = std::accumulate(mean_dist.begin(), mean_dist.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : mean_dist) var += (v - mu) * (v - mu);
  const double sigma = std::sqrt(var / static_cast<double>(n));
  const double limit = mu + sigma_mult * sigma;

  const bool has_pixels = cloud.source_pixels.size() == n;
  for (std::size_t i = 0; i < n; ++i) {
    if (mean_dist[i] > limit) continue;
    result.cloud.points.push_back(cloud.points[i]);
    if (has_pixels) result.cloud.source_pixels.push_back(cloud.source_pixels[i]);
  }
  if (result.cloud.empty()) {
    result.cloud = cloud;
    result.kept_all_fallback = true;
    return result;
  }
  result.removed = n - result.cloud.size();
  return result;
}

std::vector<std::array<std::size_t, 3>> ransac_samples(std::size_t n, int iterations,
                                                       std::uint64_t seed) {
  std::vector<std::array<std::size_t, 3>> samples;
  if (n < 3 || iterations <= 0) return samples;
  samples.reserve(static_cast<std::size_t>(iterations));
  std::mt19937_64 rng(seed);
  for (int it = 0; it < iterations; ++it) {
    std::array<std::size_t, 3> s{};
    s[0] = rng() % n;
    do s[1] = rng() % n; while (s[1] == s[0]);
    do s[2] = rng() % n; while (s[2] == s[0] || s[2] == s[1]);
    samples.push_back(s);
  }
  return samples;
}

PlaneFit fit_plane_ransac(const PointCloud& cloud, double threshold, int iterations,
                          std::uint64_t seed) {
  const auto& pts = cloud.points;
  if (pts.size() < 3) fail(ErrorCode::DegenerateCloud, "plane fit needs at least 3 points");

  const double tau = threshold * median_z(pts);
  Eigen::Vector3d lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = (hi - lo).norm();
  const double min_area2 = 1e-24 * scale * scale * scale * scale;

  std::size_t best_count = 0;
  Eigen::Vector3d best_normal = Eigen::Vector3d::Zero();
  double best_d = 0.0;
  for (const auto& s : ransac_samples(pts.size(), iterations, seed)) {
    const Eigen::Vector3d cross = (pts[s[1]] - pts[s[0]]).cross(pts[s[2]] - pts[s[0]]);
    if (cross.squaredNorm() <= min_area2) continue;
    const Eigen::Vector3d normal = cross.normalized();
    const double d = -normal.dot(pts[s[0]]);
    std::size_t count = 0;
    for (const auto& p : pts)
      if (std::abs(normal.dot(p) + d) <= tau) ++count;
    if (count > best_count) {
      best_count = count;
      best_normal = normal;
      best_d = d;
    }
  }
  if (best_count == 0) fail(ErrorCode::DegenerateCloud, "every RANSAC sample was collinear");

  std::vector<Eigen::Vector3d> consensus;
  consensus.reserve(best_count);
  for (const auto& p : pts)
    if (std::abs(best_normal.dot(p) + best_d) <= tau) consensus.push_back(p);

  const PrincipalAxes axes = principal_axes(consensus);
  Eigen::Vector3d normal = axes.axes.col(2).normalized();
  Eigen::Vector3d centroid = axes.mean;
  if (normal.dot(-centroid) < 0.0) normal = -normal;
  double d = -normal.dot(centroid);

  PlaneFit fit;
  fit.hypothesis_inliers = best_count;
  fit.threshold_abs = tau;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (std::abs(normal.dot(pts[i]) + d) <= tau) fit.inliers.push_back(i);
  if (fit.inliers.empty()) {
    // Refit drifted off every point; keep the winning hypothesis instead.
    normal = best_normal.dot(-centroid) < 0.0 ? Eigen::Vector3d(-best_normal) : best_normal;
    d = normal == best_normal ? best_d : -best_d;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (std::abs(normal.dot(pts[i]) + d) <= tau) fit.inliers.push_back(i);
  }

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (auto i : fit.inliers) mean += pts[i];
  mean /= static_cast<double>(fit.inliers.size());
  centroid = mean - (normal.dot(mean) + d) * normal;

  // Dominant in-plane direction of the inlier scatter.
  const Eigen::Vector3d u = any_perpendicular(normal);
  const Eigen::Vector3d w = normal.cross(u);
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (auto i : fit.inliers) {
    const Eigen::Vector3d c = pts[i] - centroid;
    const Eigen::Vector2d q(c.dot(u), c.dot(w));
    scatter += q * q.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(scatter);
  const Eigen::Vector2d major = eig.eigenvectors().col(1);
  Eigen::Vector3d primary = canonical_sign(major.x() * u + major.y() * w);
  primary = (primary - primary.dot(normal) * normal).normalized();

  Plane& plane = fit.plane;
  plane.normal = normal;
  plane.d = d;
  plane.centroid = centroid;
  plane.primary_dir = primary;
  const Eigen::Vector3d secondary = normal.cross(primary);
  for (auto i : fit.inliers) {
    const Eigen::Vector3d c = pts[i] - centroid;
    plane.extent.x() = std::max(plane.extent.x(), std::abs(c.dot(primary)));
    plane.extent.y() = std::max(plane.extent.y(), std::abs(c.dot(secondary)));
  }
  return fit;
}

Cylinder fit_cylinder(const PointCloud& cloud, const std::optional<Eigen::Vector3d>& direction) {
  const auto& pts = cloud.points;
  if (pts.empty()) fail(ErrorCode::DegenerateCloud, "cylinder fit needs points");

  Eigen::Vector3d axis;
  if (direction) {
    if (!(direction->norm() > 0.0)) fail(ErrorCode::InvalidArgument, "cylinder direction is zero");
    axis = direction->normalized();
  } else {
    if (pts.size() < 2) fail(ErrorCode::DegenerateCloud, "cylinder fit of a single point needs a direction");
    const PrincipalAxes axes = principal_axes(pts);
    if (!(axes.variances[0] > 0.0)) fail(ErrorCode::DegenerateCloud, "all points coincide");
    axis = axes.axes.col(0);
  }

  const Eigen::Vector3d e1 = any_perpendicular(axis);
  const Eigen::Vector3d e2 = axis.cross(e1);
  std::vector<Eigen::Vector2d> footprint;
  footprint.reserve(pts.size());
  double h_min = std::numeric_limits<double>::infinity();
  double h_max = -h_min;
  for (const auto& p : pts) {
    footprint.emplace_back(p.dot(e1), p.dot(e2));
    const double h = p.dot(axis);
    h_min = std::min(h_min, h);
    h_max = std::max(h_max, h);
  }
  const Circle2 circle = minimal_enclosing_circle(footprint);

  Cylinder cyl;
  cyl.axis_dir = axis;
  cyl.axis_point = circle.center.x() * e1 + circle.center.y() * e2 + 0.5 * (h_min + h_max) * axis;
  double r2 = 0.0;
  double half = 0.0;
  for (const auto& p : pts) {
    const Eigen::Vector3d rel = p - cyl.axis_point;
    const double along = rel.dot(axis);
    r2 = std::max(r2, (rel - along * axis).squaredNorm());
    half = std::max(half, std::abs(along));
  }
  cyl.radius = std::sqrt(r2);
  cyl.half_height = half;
  return cyl;
}

Plane derive_extruded_plane(const Plane& plane) {
  Plane out;
  Eigen::Vector3d normal = plane.normal.cross(plane.primary_dir).normalized();
  if (normal.dot(-plane.centroid) < 0.0) normal = -normal;
  out.normal = normal;
  out.centroid = plane.centroid;
  out.d = -normal.dot(plane.centroid);
  out.primary_dir = plane.primary_dir;
  out.extent = plane.extent;
  return out;
}

}  // namespace parallax
