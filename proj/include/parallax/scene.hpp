#pragma once

#include <string>
#include <vector>

#include "parallax/camera.hpp"
#include "parallax/raster.hpp"

namespace parallax {

/// Image, depth and camera of one input photo. Depth values are z-distances
/// in arbitrary (affine-invariant) units; pixels with validity 0 have no depth
/// and are treated as infinitely far.
struct DepthScene {
  Image image;
  DepthMap depth;
  PinholeCamera camera;
  Bitmap validity;

  [[nodiscard]] int width() const noexcept { return image.width(); }
  [[nodiscard]] int height() const noexcept { return image.height(); }
  [[nodiscard]] bool valid(int x, int y) const { return validity(x, y) != 0; }

  friend bool operator==(const DepthScene&, const DepthScene&) = default;
};

/// Builds a scene whose validity mask is derived from the depth map: a pixel
/// is valid iff its depth is finite and positive.
DepthScene make_scene(Image image, DepthMap depth, PinholeCamera camera);

struct ValidationReport {
  std::vector<std::string> problems;

  [[nodiscard]] bool ok() const noexcept { return problems.empty(); }
};

ValidationReport validate_scene(const DepthScene& scene);

/// Median of the valid depth values (0 if there are none).
double median_valid_depth(const DepthScene& scene);

}  // namespace parallax
