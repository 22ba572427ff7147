#include "parallax/services.hpp"

#include <cstring>

#include "parallax/crypto.hpp"
#include "parallax/error.hpp"
#include "parallax/json.hpp"
#include "parallax/scene_io.hpp"

namespace parallax {
namespace fs = std::filesystem;

namespace {

void append_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::string read_text(const fs::path& path) {
  const Bytes b = read_file(path.string());
  return {b.begin(), b.end()};
}

const char* kind_key(BodyKind kind) { return kind == BodyKind::Face ? "face" : "skeleton"; }

class FixtureDepth final : public DepthClient {
 public:
  explicit FixtureDepth(std::shared_ptr<const FixtureStore> store) : store_(std::move(store)) {}
  DepthEstimate estimate(const Image& image, std::span<const std::uint8_t>) override {
    const fs::path dir = store_->fixture_for(image);
    DepthEstimate out;
    out.depth = decode_dsd(read_file((dir / "depth.dsd").string()));
    if (fs::exists(dir / "camera.json")) out.camera = parse_camera_json(read_text(dir / "camera.json")).camera;
    return out;
  }

 private:
  std::shared_ptr<const FixtureStore> store_;
};

class FixtureSegmentation final : public SegmentationClient {
 public:
  explicit FixtureSegmentation(std::shared_ptr<const FixtureStore> store) : store_(std::move(store)) {}
  Mask segment(const Image& image, const std::string& prompt) override {
    const fs::path path = store_->fixture_for(image) / "masks" / (prompt_fingerprint(prompt) + ".png");
    if (!fs::exists(path)) fail(ErrorCode::FixtureMissing, "no recorded mask for prompt \"" + prompt + "\"");
    const Image png = decode_png(read_file(path.string()));
    Mask mask{Bitmap(png.width(), png.height()), prompt};
    for (int y = 0; y < png.height(); ++y)
      for (int x = 0; x < png.width(); ++x) mask.bitmap(x, y) = png(x, y).r >= 128 && png(x, y).a >= 128;
    return mask;
  }

 private:
  std::shared_ptr<const FixtureStore> store_;
};

class FixtureLandmarks final : public LandmarkClient {
 public:
  explicit FixtureLandmarks(std::shared_ptr<const FixtureStore> store) : store_(std::move(store)) {}
  std::vector<Landmark2D> detect(const Image& image, const Mask& mask, BodyKind kind) override {
    const fs::path path = store_->fixture_for(image) / "landmarks" / (mask_fingerprint(mask.bitmap) + ".json");
    if (!fs::exists(path)) fail(ErrorCode::FixtureMissing, "no recorded landmarks for mask of \"" + mask.prompt + "\"");
    std::vector<Landmark2D> out;
    try {
      const Json j = Json::parse(read_text(path));
      for (const auto& l : j.value(kind_key(kind), Json::array()))
        out.push_back({l.at("name").get<std::string>(), l.at("u").get<double>(), l.at("v").get<double>()});
    } catch (const Json::exception& e) {
      fail(ErrorCode::FormatError, path.string() + ": " + e.what());
    }
    return out;
  }

 private:
  std::shared_ptr<const FixtureStore> store_;
};

class FixturePrograms final : public ProgramClient {
 public:
  explicit FixturePrograms(std::shared_ptr<const FixtureStore> store) : store_(std::move(store)) {}
  std::vector<GeneratedProgram> generate(const Image& image, std::span<const std::uint8_t>,
                                         const std::string&) override {
    const fs::path path = store_->fixture_for(image) / "programs.json";
    if (!fs::exists(path)) fail(ErrorCode::FixtureMissing, "no recorded programs in " + path.parent_path().string());
    std::vector<GeneratedProgram> out;
    try {
      const Json j = Json::parse(read_text(path));
      for (const auto& p : j.at("programs"))
        out.push_back({p.at("text").get<std::string>(), p.value("rationale", std::string{})});
    } catch (const Json::exception& e) {
      fail(ErrorCode::FormatError, path.string() + ": " + e.what());
    }
    return out;
  }

 private:
  std::shared_ptr<const FixtureStore> store_;
};

// Serializes every call through one mutex per client.
class SerialDepth final : public DepthClient {
 public:
  explicit SerialDepth(std::shared_ptr<DepthClient> inner) : inner_(std::move(inner)) {}
  DepthEstimate estimate(const Image& image, std::span<const std::uint8_t> encoded) override {
    std::lock_guard lock(mutex_);
    return inner_->estimate(image, encoded);
  }

 private:
  std::shared_ptr<DepthClient> inner_;
  std::mutex mutex_;
};

class SerialSegmentation final : public SegmentationClient {
 public:
  explicit SerialSegmentation(std::shared_ptr<SegmentationClient> inner) : inner_(std::move(inner)) {}
  Mask segment(const Image& image, const std::string& prompt) override {
    std::lock_guard lock(mutex_);
    return inner_->segment(image, prompt);
  }

 private:
  std::shared_ptr<SegmentationClient> inner_;
  std::mutex mutex_;
};

class SerialLandmarks final : public LandmarkClient {
 public:
  explicit SerialLandmarks(std::shared_ptr<LandmarkClient> inner) : inner_(std::move(inner)) {}
  std::vector<Landmark2D> detect(const Image& image, const Mask& mask, BodyKind kind) override {
    std::lock_guard lock(mutex_);
    return inner_->detect(image, mask, kind);
  }

 private:
  std::shared_ptr<LandmarkClient> inner_;
  std::mutex mutex_;
};

class SerialPrograms final : public ProgramClient {
 public:
  explicit SerialPrograms(std::shared_ptr<ProgramClient> inner) : inner_(std::move(inner)) {}
  std::vector<GeneratedProgram> generate(const Image& image, std::span<const std::uint8_t> encoded,
                                         const std::string& prompt) override {
    std::lock_guard lock(mutex_);
    return inner_->generate(image, encoded, prompt);
  }

 private:
  std::shared_ptr<ProgramClient> inner_;
  std::mutex mutex_;
};

}  // namespace

std::string image_fingerprint(const Image& image) {
  Bytes buf;
  buf.reserve(8 + image.size() * 4);
  append_u32(buf, static_cast<std::uint32_t>(image.width()));
  append_u32(buf, static_cast<std::uint32_t>(image.height()));
  for (const Rgba8& p : image.pixels()) buf.insert(buf.end(), {p.r, p.g, p.b, p.a});
  return sha256_hex(buf);
}

std::string mask_fingerprint(const Bitmap& bitmap) {
  Bytes buf;
  buf.reserve(8 + bitmap.size());
  append_u32(buf, static_cast<std::uint32_t>(bitmap.width()));
  append_u32(buf, static_cast<std::uint32_t>(bitmap.height()));
  for (std::uint8_t v : bitmap.pixels()) buf.push_back(v ? 1 : 0);
  return sha256_hex(buf);
}

std::string prompt_fingerprint(const std::string& prompt) { return sha256_hex(std::string_view(prompt)); }

std::string landmarks_fixture_json(const std::vector<Landmark2D>& skeleton, const std::vector<Landmark2D>& face) {
  auto list = [](const std::vector<Landmark2D>& ls) {
    Json a = Json::array();
    for (const auto& l : ls) a.push_back({{"name", l.name}, {"u", l.u}, {"v", l.v}});
    return a;
  };
  return Json{{"skeleton", list(skeleton)}, {"face", list(face)}}.dump(2) + "\n";
}

FixtureStore::FixtureStore(fs::path root) : root_(std::move(root)) {
  if (!fs::is_directory(root_)) fail(ErrorCode::FixtureMissing, "fixture directory not found: " + root_.string());
  std::vector<fs::path> dirs;
  if (fs::exists(root_ / "image.png")) {
    dirs.push_back(root_);
  } else {
    for (const auto& entry : fs::directory_iterator(root_))
      if (entry.is_directory() && fs::exists(entry.path() / "image.png")) dirs.push_back(entry.path());
  }
  for (const auto& dir : dirs)
    by_fingerprint_.emplace(image_fingerprint(decode_png(read_file((dir / "image.png").string()))), dir);
}

fs::path FixtureStore::fixture_for(const Image& image) const {
  const auto it = by_fingerprint_.find(image_fingerprint(image));
  if (it == by_fingerprint_.end())
    fail(ErrorCode::FixtureMissing, "no fixture recorded for this image under " + root_.string());
  return it->second;
}

std::vector<fs::path> FixtureStore::fixtures() const {
  std::vector<fs::path> out;
  for (const auto& [key, dir] : by_fingerprint_) out.push_back(dir);
  std::sort(out.begin(), out.end());
  return out;
}

ServiceBundle make_fixture_services(const fs::path& root) {
  auto store = std::make_shared<const FixtureStore>(root);
  return {std::make_shared<FixtureDepth>(store), std::make_shared<FixtureSegmentation>(store),
          std::make_shared<FixtureLandmarks>(store), std::make_shared<FixturePrograms>(store)};
}

RemoteConfig parse_remote_config(const std::string& text) {
  RemoteConfig config;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::FormatError, std::string("remote config is not valid JSON: ") + e.what());
  }
  auto read = [&](const char* key, RemoteEndpoint& ep) {
    if (!j.contains(key)) return;
    const Json& e = j.at(key);
    if (e.contains("url") || e.contains("token"))
      fail(ErrorCode::FormatError, std::string("remote config '") + key +
                                       "' must name environment variables (url_env, token_env), not values");
    ep.url_env = e.value("url_env", ep.url_env);
    ep.token_env = e.value("token_env", ep.token_env);
    if (e.contains("timeout_s"))
      ep.timeout = std::chrono::milliseconds(static_cast<long long>(e.at("timeout_s").get<double>() * 1000.0));
  };
  read("depth", config.depth);
  read("segment", config.segment);
  read("landmark", config.landmark);
  read("program", config.program);
  return config;
}

ServiceBundle serialized(ServiceBundle bundle) {
  return {bundle.depth ? std::make_shared<SerialDepth>(bundle.depth) : nullptr,
          bundle.segment ? std::make_shared<SerialSegmentation>(bundle.segment) : nullptr,
          bundle.landmark ? std::make_shared<SerialLandmarks>(bundle.landmark) : nullptr,
          bundle.program ? std::make_shared<SerialPrograms>(bundle.program) : nullptr};
}

}  // namespace parallax
