#include "parallax/scene_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>

#include <json.hpp>

#include "parallax/error.hpp"

namespace parallax {
namespace {

constexpr std::uint8_t kDsdMagic[4] = {'D', 'S', 'D', 'M'};

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[at + static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

}  // namespace

Bytes encode_dsd(const DepthMap& depth, const Bitmap& validity) {
  if (validity.width() != depth.width() || validity.height() != depth.height())
    fail(ErrorCode::DimensionMismatch, "encode_dsd: validity and depth dimensions differ");
  Bytes out(std::begin(kDsdMagic), std::end(kDsdMagic));
  out.reserve(12 + depth.size() * 4);
  put_u32(out, static_cast<std::uint32_t>(depth.width()));
  put_u32(out, static_cast<std::uint32_t>(depth.height()));
  const float nan = std::numeric_limits<float>::quiet_NaN();
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const float z = validity(x, y) ? depth(x, y) : nan;
      put_u32(out, std::bit_cast<std::uint32_t>(z));
    }
  }
  return out;
}

DepthMap decode_dsd(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kDsdMagic, 4) != 0)
    fail(ErrorCode::FormatError, "depth file lacks the DSDM header");
  const std::uint32_t w = get_u32(bytes, 4);
  const std::uint32_t h = get_u32(bytes, 8);
  const std::uint64_t count = static_cast<std::uint64_t>(w) * h;
  if (bytes.size() != 12 + count * 4)
    fail(ErrorCode::FormatError, "depth file size does not match its header");
  DepthMap depth(static_cast<int>(w), static_cast<int>(h));
  std::size_t at = 12;
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x, at += 4) {
      depth(static_cast<int>(x), static_cast<int>(y)) = std::bit_cast<float>(get_u32(bytes, at));
    }
  }
  return depth;
}

CameraFile parse_camera_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, std::string("camera.json: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::FormatError, "camera.json must hold an object");
  CameraFile file;
  auto number = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_number()) fail(ErrorCode::FormatError, std::string("camera.json: ") + key + " is not a number");
    return j[key].get<double>();
  };
  const auto fx = number("fx"), fy = number("fy"), cx = number("cx"), cy = number("cy");
  const auto w = number("width"), h = number("height");
  if (fx && fy && cx && cy && w && h) {
    file.camera = PinholeCamera{*fx, *fy, *cx, *cy, static_cast<int>(*w), static_cast<int>(*h)};
  }
  file.scale = number("scale");
  file.offset = number("offset");
  return file;
}

std::string camera_json(const PinholeCamera& camera) {
  nlohmann::ordered_json j;
  j["fx"] = camera.fx;
  j["fy"] = camera.fy;
  j["cx"] = camera.cx;
  j["cy"] = camera.cy;
  j["width"] = camera.width;
  j["height"] = camera.height;
  return j.dump(2) + "\n";
}

DepthMap depth_from_gray16(const Raster<std::uint16_t>& pixels, double scale, double offset) {
  DepthMap depth(pixels.width(), pixels.height());
  for (int y = 0; y < pixels.height(); ++y)
    for (int x = 0; x < pixels.width(); ++x)
      depth(x, y) = static_cast<float>(pixels(x, y) * scale + offset);
  return depth;
}

DepthScene load_scene_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  Image image = decode_png(read_file((root / "image.png").string()));

  CameraFile cam_file;
  if (fs::exists(root / "camera.json")) {
    const Bytes text = read_file((root / "camera.json").string());
    cam_file = parse_camera_json(std::string(text.begin(), text.end()));
  }

  DepthMap depth;
  if (fs::exists(root / "depth.dsd")) {
    depth = decode_dsd(read_file((root / "depth.dsd").string()));
  } else if (fs::exists(root / "depth.png")) {
    depth = depth_from_gray16(decode_png_gray16(read_file((root / "depth.png").string())),
                              cam_file.scale.value_or(1.0), cam_file.offset.value_or(0.0));
  } else {
    fail(ErrorCode::IoError, "scene directory " + dir + " has neither depth.dsd nor depth.png");
  }

  if (depth.width() != image.width() || depth.height() != image.height())
    fail(ErrorCode::DimensionMismatch, "depth and image dimensions differ in " + dir);

  const PinholeCamera camera = cam_file.camera.value_or(default_camera(image.width(), image.height()));
  DepthScene scene = make_scene(std::move(image), std::move(depth), camera);
  const auto report = validate_scene(scene);
  if (!report.ok()) fail(ErrorCode::FormatError, "invalid scene in " + dir + ": " + report.problems.front());
  return scene;
}

void save_scene_dir(const DepthScene& scene, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path root(dir);
  write_file((root / "image.png").string(), encode_png(scene.image));
  write_file((root / "depth.dsd").string(), encode_dsd(scene.depth, scene.validity));
  const std::string cam = camera_json(scene.camera);
  write_file((root / "camera.json").string(),
             std::span(reinterpret_cast<const std::uint8_t*>(cam.data()), cam.size()));
}

}  // namespace parallax
