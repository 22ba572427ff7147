#pragma once

#include <optional>
#include <span>
#include <string>

#include "parallax/image_io.hpp"
#include "parallax/scene.hpp"

namespace parallax {

/// `.dsd` depth container: "DSDM", u32 LE width, u32 LE height, then
/// width*height LE float32 values, row-major from the top row. NaN marks
/// invalid depth.
Bytes encode_dsd(const DepthMap& depth, const Bitmap& validity);
DepthMap decode_dsd(std::span<const std::uint8_t> bytes);

struct CameraFile {
  std::optional<PinholeCamera> camera;
  std::optional<double> scale;
  std::optional<double> offset;
};

CameraFile parse_camera_json(const std::string& text);
std::string camera_json(const PinholeCamera& camera);

/// Loads a scene container directory: image.png plus depth.dsd, or a 16-bit
/// depth.png with scale/offset from camera.json. Missing intrinsics fall back
/// to default_camera().
DepthScene load_scene_dir(const std::string& dir);
void save_scene_dir(const DepthScene& scene, const std::string& dir);

/// Depth from a 16-bit grayscale raster: depth = pixel * scale + offset.
DepthMap depth_from_gray16(const Raster<std::uint16_t>& pixels, double scale, double offset);

}  // namespace parallax
