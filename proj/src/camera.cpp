#include "parallax/camera.hpp"

#include <cmath>
#include <numbers>

#include "parallax/error.hpp"

namespace parallax {

PinholeCamera default_camera(int width, int height) {
  const double half_fov = kDefaultVerticalFovDeg * std::numbers::pi / 360.0;
  const double f = 0.5 * static_cast<double>(height) / std::tan(half_fov);
  return PinholeCamera{f, f, 0.5 * (width - 1), 0.5 * (height - 1), width, height};
}

Eigen::Vector3d unproject_pixel(const PinholeCamera& camera, double u, double v, double depth) {
  if (!(depth > 0.0)) fail(ErrorCode::NonpositiveDepth, "unproject_pixel: depth must be > 0");
  return {(u - camera.cx) * depth / camera.fx, (v - camera.cy) * depth / camera.fy, depth};
}

Eigen::Vector3d project_point(const PinholeCamera& camera, const Eigen::Vector3d& p) {
  if (!(p.z() > 0.0)) fail(ErrorCode::BehindCamera, "project_point: point is behind the camera");
  return {camera.cx + camera.fx * p.x() / p.z(), camera.cy + camera.fy * p.y() / p.z(), p.z()};
}

}  // namespace parallax
