#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "parallax/geometry.hpp"

namespace parallax {

inline constexpr double kDefaultRansacThreshold = 0.01;
inline constexpr int kDefaultRansacIterations = 500;
inline constexpr int kDefaultCleanNeighbors = 8;
inline constexpr double kDefaultCleanSigma = 2.0;
inline constexpr std::size_t kSphereSampleLimit = 50'000;

struct CleanResult {
  PointCloud cloud;
  std::size_t removed = 0;
  /// Set when every point would have been rejected and the input came back unchanged.
  bool kept_all_fallback = false;
};

/// Statistical outlier removal: keep points whose mean distance to their k
/// nearest neighbors is at most mean + sigma_mult * stddev over the cloud.
/// k is clamped to n - 1.
CleanResult clean_pointcloud(const PointCloud& cloud, int k = kDefaultCleanNeighbors,
                             double sigma_mult = kDefaultCleanSigma);

/// Index triples drawn by fit_plane_ransac for a cloud of `n` points. Exposed so
/// callers can replay the hypothesis sequence.
std::vector<std::array<std::size_t, 3>> ransac_samples(std::size_t n, int iterations,
                                                       std::uint64_t seed);

struct PlaneFit {
  Plane plane;
  /// Points within `threshold_abs` of the returned (refitted) plane.
  std::vector<std::size_t> inliers;
  /// Inlier count of the best hypothesis before the refit.
  std::size_t hypothesis_inliers = 0;
  double threshold_abs = 0.0;
};

/// RANSAC plane with a threshold relative to the cloud's median depth,
/// least-squares refit on the best consensus set, camera-facing normal.
/// Throws DegenerateCloud.
PlaneFit fit_plane_ransac(const PointCloud& cloud, double threshold = kDefaultRansacThreshold,
                          int iterations = kDefaultRansacIterations, std::uint64_t seed = 0);

/// Containing cylinder: axis is `direction` when given, otherwise the first
/// principal component; the axis passes through the center of the smallest
/// circle enclosing the points projected orthogonally to it.
Cylinder fit_cylinder(const PointCloud& cloud,
                      const std::optional<Eigen::Vector3d>& direction = std::nullopt);

/// Exact minimal enclosing sphere (randomized move-to-front). Clouds larger
/// than kSphereSampleLimit are uniformly subsampled first.
Sphere fit_sphere(const PointCloud& cloud, std::uint64_t seed = 0);

/// Minimal enclosing ball of an explicit point list, no subsampling.
Sphere minimal_enclosing_sphere(std::span<const Eigen::Vector3d> points, std::uint64_t seed = 0);

struct Circle2 {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;
};

Circle2 minimal_enclosing_circle(std::span<const Eigen::Vector2d> points, std::uint64_t seed = 0);

/// Plane perpendicular to `plane` containing its normal and primary direction.
Plane derive_extruded_plane(const Plane& plane);

/// Throws MissingLandmarks when the required landmarks are absent
/// (skeleton: shoulders and hips; face: eyes and nose tip).
BodyFrame derive_body_frames(std::span<const Landmark3D> landmarks, BodyKind kind);

/// Principal axes of a point set, eigenvalues descending. Each axis has its
/// largest-magnitude component positive.
struct PrincipalAxes {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();  // columns
  Eigen::Vector3d variances = Eigen::Vector3d::Zero();
};

PrincipalAxes principal_axes(std::span<const Eigen::Vector3d> points);

/// Flips `v` so its largest-magnitude component is positive.
Eigen::Vector3d canonical_sign(const Eigen::Vector3d& v);

}  // namespace parallax
