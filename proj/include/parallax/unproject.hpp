#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "parallax/scene.hpp"

namespace parallax {

struct PixelIndex {
  int u = 0;
  int v = 0;
  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
};

/// Camera-space samples. `source_pixels` is either empty or parallel to
/// `points`.
struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<PixelIndex> source_pixels;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  [[nodiscard]] bool empty() const noexcept { return points.empty(); }
};

struct Mask {
  Bitmap bitmap;
  std::string prompt;
};

struct Landmark2D {
  std::string name;
  double u = 0.0;
  double v = 0.0;
};

struct Landmark3D {
  std::string name;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

/// Pose landmark names (33-point body model).
std::span<const std::string_view> skeleton_landmark_names();
/// Face landmark names.
std::span<const std::string_view> face_landmark_names();

/// Unprojects every valid-depth pixel under the mask. Throws DimensionMismatch
/// or EmptySelection.
PointCloud mask_to_pointcloud(const DepthScene& scene, const Mask& mask);

/// Bilinear depth at a subpixel location, renormalized over valid neighbors.
/// Falls back to the mean of the valid 3x3 neighborhood around the nearest
/// pixel; nullopt when that window has no valid depth either.
std::optional<double> sample_depth(const DepthScene& scene, double u, double v);

struct LandmarkCast {
  std::vector<Landmark3D> landmarks;
  std::vector<std::string> dropped;
};

/// Throws InvalidArgument for out-of-bounds input and AllLandmarksInvalid when
/// a non-empty input loses every landmark.
LandmarkCast cast_landmarks(const DepthScene& scene, std::span<const Landmark2D> landmarks);

}  // namespace parallax
