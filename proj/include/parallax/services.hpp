#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parallax/geometry.hpp"
#include "parallax/image_io.hpp"
#include "parallax/scene.hpp"
#include "parallax/unproject.hpp"

namespace parallax {

struct DepthEstimate {
  DepthMap depth;
  std::optional<PinholeCamera> camera;
};

struct GeneratedProgram {
  std::string text;
  std::string rationale;

  friend bool operator==(const GeneratedProgram&, const GeneratedProgram&) = default;
};

/// Monocular depth model. Throws DepthServiceError or FixtureMissing.
class DepthClient {
 public:
  virtual ~DepthClient() = default;
  virtual DepthEstimate estimate(const Image& image, std::span<const std::uint8_t> encoded) = 0;
};

/// Text-grounded segmentation. Throws SegmentServiceError or FixtureMissing.
class SegmentationClient {
 public:
  virtual ~SegmentationClient() = default;
  virtual Mask segment(const Image& image, const std::string& prompt) = 0;
};

/// 2D pose / face landmark detection restricted to a mask. An empty result
/// means nothing was detected.
class LandmarkClient {
 public:
  virtual ~LandmarkClient() = default;
  virtual std::vector<Landmark2D> detect(const Image& image, const Mask& mask, BodyKind kind) = 0;
};

/// Vision-language model producing visual programs for an image.
class ProgramClient {
 public:
  virtual ~ProgramClient() = default;
  virtual std::vector<GeneratedProgram> generate(const Image& image,
                                                 std::span<const std::uint8_t> encoded,
                                                 const std::string& prompt) = 0;
};

struct ServiceBundle {
  std::shared_ptr<DepthClient> depth;
  std::shared_ptr<SegmentationClient> segment;
  std::shared_ptr<LandmarkClient> landmark;
  std::shared_ptr<ProgramClient> program;
};

/// sha256 over (u32 LE width, u32 LE height, RGBA bytes). Fixtures are keyed
/// by this so PNG re-encoding does not change the key.
std::string image_fingerprint(const Image& image);
/// sha256 over (u32 LE width, u32 LE height, one 0/1 byte per pixel).
std::string mask_fingerprint(const Bitmap& bitmap);
/// sha256 of the UTF-8 prompt bytes.
std::string prompt_fingerprint(const std::string& prompt);

/// Landmark fixture file body: {"skeleton":[{"name","u","v"}...], "face":[...]}.
std::string landmarks_fixture_json(const std::vector<Landmark2D>& skeleton,
                                   const std::vector<Landmark2D>& face);

/// Recorded model responses. `root` is either one fixture directory (it holds
/// image.png) or a directory of fixture directories; a request is routed to
/// the fixture whose image fingerprint matches.
class FixtureStore {
 public:
  explicit FixtureStore(std::filesystem::path root);

  [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
  /// Fixture directory recorded for this image. Throws FixtureMissing.
  std::filesystem::path fixture_for(const Image& image) const;
  [[nodiscard]] std::vector<std::filesystem::path> fixtures() const;

 private:
  std::filesystem::path root_;
  std::map<std::string, std::filesystem::path> by_fingerprint_;
};

ServiceBundle make_fixture_services(const std::filesystem::path& root);

/// Endpoint for one remote model. URL and token are read from the named
/// environment variables at call time; tokens never live in config files.
struct RemoteEndpoint {
  std::string url_env;
  std::string token_env;
  std::chrono::milliseconds timeout{30'000};
};

struct RemoteConfig {
  RemoteEndpoint depth{"PARALLAX_DEPTH_URL", "PARALLAX_DEPTH_TOKEN", std::chrono::seconds(60)};
  RemoteEndpoint segment{"PARALLAX_SEGMENT_URL", "PARALLAX_SEGMENT_TOKEN", std::chrono::seconds(30)};
  RemoteEndpoint landmark{"PARALLAX_LANDMARK_URL", "PARALLAX_LANDMARK_TOKEN", std::chrono::seconds(30)};
  RemoteEndpoint program{"PARALLAX_PROGRAM_URL", "PARALLAX_PROGRAM_TOKEN", std::chrono::seconds(120)};
};

/// {"depth":{"url_env":..,"token_env":..,"timeout_s":..}, "segment":{..}, ...};
/// absent keys keep their defaults.
RemoteConfig parse_remote_config(const std::string& text);

ServiceBundle make_remote_services(const RemoteConfig& config);

/// Wraps a client so concurrent callers are serialized.
ServiceBundle serialized(ServiceBundle bundle);

}  // namespace parallax
