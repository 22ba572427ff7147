#pragma once

#include <Eigen/Core>

namespace parallax {

/// Pinhole intrinsics. Pixel centers sit at integer (u, v); v grows downward,
/// so image "up" is camera-space -y.
struct PinholeCamera {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  friend bool operator==(const PinholeCamera&, const PinholeCamera&) = default;
};

/// Camera used when input metadata carries no intrinsics: 55 degree vertical
/// field of view, principal point at the image center, square pixels.
PinholeCamera default_camera(int width, int height);

inline constexpr double kDefaultVerticalFovDeg = 55.0;

/// (u, v, depth) -> camera-space point. Depth is z along the optical axis.
/// Throws NonpositiveDepth.
Eigen::Vector3d unproject_pixel(const PinholeCamera& camera, double u, double v, double depth);

/// Camera-space point -> (u, v, z). Throws BehindCamera when z <= 0.
Eigen::Vector3d project_point(const PinholeCamera& camera, const Eigen::Vector3d& p);

/// Camera-space image-up direction.
inline Eigen::Vector3d image_up() { return {0.0, -1.0, 0.0}; }

}  // namespace parallax
