#include "parallax/unproject.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "parallax/error.hpp"

namespace parallax {
namespace {

constexpr std::array<std::string_view, 33> kSkeletonNames = {
    "nose",           "left_eye_inner", "left_eye",        "left_eye_outer",  "right_eye_inner",
    "right_eye",      "right_eye_outer", "left_ear",       "right_ear",       "mouth_left",
    "mouth_right",    "left_shoulder",  "right_shoulder",  "left_elbow",      "right_elbow",
    "left_wrist",     "right_wrist",    "left_pinky",      "right_pinky",     "left_index",
    "right_index",    "left_thumb",     "right_thumb",     "left_hip",        "right_hip",
    "left_knee",      "right_knee",     "left_ankle",      "right_ankle",     "left_heel",
    "right_heel",     "left_foot_index", "right_foot_index",
};

constexpr std::array<std::string_view, 9> kFaceNames = {
    "left_eye", "right_eye",  "nose_tip",  "chin",     "left_ear",
    "right_ear", "mouth_left", "mouth_right", "forehead",
};

}  // namespace

std::span<const std::string_view> skeleton_landmark_names() { return kSkeletonNames; }
std::span<const std::string_view> face_landmark_names() { return kFaceNames; }

PointCloud mask_to_pointcloud(const DepthScene& scene, const Mask& mask) {
  if (mask.bitmap.width() != scene.width() || mask.bitmap.height() != scene.height())
    fail(ErrorCode::DimensionMismatch, "mask dimensions differ from the scene");
  PointCloud cloud;
  for (int v = 0; v < scene.height(); ++v) {
    for (int u = 0; u < scene.width(); ++u) {
      if (!mask.bitmap(u, v) || !scene.valid(u, v)) continue;
      cloud.points.push_back(unproject_pixel(scene.camera, u, v, scene.depth(u, v)));
      cloud.source_pixels.push_back({u, v});
    }
  }
  if (cloud.empty())
    fail(ErrorCode::EmptySelection, "mask '" + mask.prompt + "' selects no valid depth");
  return cloud;
}

std::optional<double> sample_depth(const DepthScene& scene, double u, double v) {
  const int x0 = static_cast<int>(std::floor(u));
  const int y0 = static_cast<int>(std::floor(v));
  const double fx = u - x0;
  const double fy = v - y0;

  double weight = 0.0;
  double acc = 0.0;
  for (int dy = 0; dy <= 1; ++dy) {
    for (int dx = 0; dx <= 1; ++dx) {
      const int x = x0 + dx;
      const int y = y0 + dy;
      if (!scene.depth.contains(x, y) || !scene.valid(x, y)) continue;
      const double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
      weight += w;
      acc += w * scene.depth(x, y);
    }
  }
  if (weight > 1e-12) return acc / weight;

  const int cx = static_cast<int>(std::lround(u));
  const int cy = static_cast<int>(std::lround(v));
  int count = 0;
  acc = 0.0;
  for (int y = cy - 1; y <= cy + 1; ++y) {
    for (int x = cx - 1; x <= cx + 1; ++x) {
      if (!scene.depth.contains(x, y) || !scene.valid(x, y)) continue;
      acc += scene.depth(x, y);
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return acc / count;
}

LandmarkCast cast_landmarks(const DepthScene& scene, std::span<const Landmark2D> landmarks) {
  LandmarkCast result;
  for (const auto& lm : landmarks) {
    if (!(lm.u >= 0.0 && lm.u < scene.width() && lm.v >= 0.0 && lm.v < scene.height())) {
      std::ostringstream os;
      os << "landmark " << lm.name << " at (" << lm.u << "," << lm.v << ") is outside the image";
      fail(ErrorCode::InvalidArgument, os.str());
    }
    const auto z = sample_depth(scene, lm.u, lm.v);
    if (!z) {
      result.dropped.push_back(lm.name);
      continue;
    }
    result.landmarks.push_back({lm.name, unproject_pixel(scene.camera, lm.u, lm.v, *z)});
  }
  if (!landmarks.empty() && result.landmarks.empty())
    fail(ErrorCode::AllLandmarksInvalid, "no landmark has valid depth nearby");
  return result;
}

}  // namespace parallax
