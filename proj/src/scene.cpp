#include "parallax/scene.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace parallax {

DepthScene make_scene(Image image, DepthMap depth, PinholeCamera camera) {
  DepthScene scene;
  scene.validity = Bitmap(depth.width(), depth.height(), 0);
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const float z = depth(x, y);
      scene.validity(x, y) = (std::isfinite(z) && z > 0.0f) ? 1 : 0;
    }
  }
  scene.image = std::move(image);
  scene.depth = std::move(depth);
  scene.camera = camera;
  return scene;
}

ValidationReport validate_scene(const DepthScene& scene) {
  ValidationReport report;
  auto problem = [&](const std::string& text) { report.problems.push_back(text); };
  const auto& cam = scene.camera;

  if (!(cam.fx > 0.0)) problem("fx must be > 0");
  if (!(cam.fy > 0.0)) problem("fy must be > 0");
  if (!(cam.cx >= 0.0 && cam.cx < cam.width)) problem("cx outside [0, width)");
  if (!(cam.cy >= 0.0 && cam.cy < cam.height)) problem("cy outside [0, height)");

  const int w = scene.image.width();
  const int h = scene.image.height();
  if (cam.width != w || cam.height != h) {
    std::ostringstream os;
    os << "dimension mismatch: camera " << cam.width << "x" << cam.height << " vs image " << w
       << "x" << h;
    problem(os.str());
  }
  if (scene.depth.width() != w || scene.depth.height() != h) {
    std::ostringstream os;
    os << "dimension mismatch: depth " << scene.depth.width() << "x" << scene.depth.height()
       << " vs image " << w << "x" << h;
    problem(os.str());
  }
  if (scene.validity.width() != scene.depth.width() ||
      scene.validity.height() != scene.depth.height()) {
    std::ostringstream os;
    os << "dimension mismatch: validity " << scene.validity.width() << "x"
       << scene.validity.height() << " vs depth " << scene.depth.width() << "x"
       << scene.depth.height();
    problem(os.str());
    return report;
  }

  for (int y = 0; y < scene.depth.height(); ++y) {
    for (int x = 0; x < scene.depth.width(); ++x) {
      if (!scene.validity(x, y)) continue;
      const float z = scene.depth(x, y);
      std::ostringstream os;
      if (!std::isfinite(z)) {
        os << "nonfinite depth at (" << x << "," << y << ")";
        problem(os.str());
      } else if (z <= 0.0f) {
        os << "nonpositive depth at (" << x << "," << y << ")";
        problem(os.str());
      }
    }
  }
  return report;
}

double median_valid_depth(const DepthScene& scene) {
  std::vector<float> values;
  values.reserve(scene.depth.size());
  for (int y = 0; y < scene.depth.height(); ++y)
    for (int x = 0; x < scene.depth.width(); ++x)
      if (scene.validity(x, y)) values.push_back(scene.depth(x, y));
  if (values.empty()) return 0.0;
  auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

}  // namespace parallax
