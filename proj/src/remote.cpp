#include "parallax/services.hpp"

#include <cstdlib>
#include <regex>

#include "parallax/crypto.hpp"
#include "parallax/error.hpp"
#include "parallax/json.hpp"
#include "parallax/scene_io.hpp"

// After Eigen: <resolv.h> defines a `_res` macro that collides with Eigen internals.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace parallax {
namespace {

struct Target {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

std::string env_or_empty(const std::string& name) {
  const char* v = name.empty() ? nullptr : std::getenv(name.c_str());
  return v ? v : "";
}

Target resolve_target(const RemoteEndpoint& ep, ErrorCode code) {
  const std::string url = env_or_empty(ep.url_env);
  if (url.empty()) fail(code, "environment variable " + ep.url_env + " is not set");
  static const std::regex pattern(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, pattern)) fail(code, "malformed endpoint URL in " + ep.url_env);
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

std::unique_ptr<httplib::Client> make_client(const Target& target, const RemoteEndpoint& ep) {
  auto client = std::make_unique<httplib::Client>(target.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(ep.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(ep.timeout - secs);
  client->set_connection_timeout(secs.count(), usecs.count());
  client->set_read_timeout(secs.count(), usecs.count());
  client->set_write_timeout(secs.count(), usecs.count());
  if (const std::string token = env_or_empty(ep.token_env); !token.empty())
    client->set_bearer_token_auth(token);
  return client;
}

const httplib::Response& checked(const httplib::Result& res, ErrorCode code, const std::string& what) {
  if (!res) fail(code, what + " request failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    fail(code, what + " returned HTTP " + std::to_string(res->status));
  return *res;
}

std::string as_string(std::span<const std::uint8_t> bytes) { return {bytes.begin(), bytes.end()}; }

Json parse_body(const std::string& body, ErrorCode code, const std::string& what) {
  try {
    return Json::parse(body);
  } catch (const Json::exception& e) {
    fail(code, what + " returned invalid JSON: " + e.what());
  }
}

class RemoteDepth final : public DepthClient {
 public:
  explicit RemoteDepth(RemoteEndpoint ep) : ep_(std::move(ep)) {}
  DepthEstimate estimate(const Image& image, std::span<const std::uint8_t> encoded) override {
    constexpr auto code = ErrorCode::DepthServiceError;
    const Target t = resolve_target(ep_, code);
    const Bytes fallback = encoded.empty() ? encode_png(image) : Bytes{};
    const auto body = encoded.empty() ? std::span<const std::uint8_t>(fallback) : encoded;
    const char* type = looks_like_jpeg(body) ? "image/jpeg" : "image/png";
    const auto res = make_client(t, ep_)->Post(t.path, as_string(body), type);
    const auto& r = checked(res, code, "depth service");
    DepthEstimate out;
    try {
      out.depth = decode_dsd({reinterpret_cast<const std::uint8_t*>(r.body.data()), r.body.size()});
      if (r.has_header("X-Camera")) out.camera = parse_camera_json(r.get_header_value("X-Camera")).camera;
    } catch (const Error& e) {
      fail(code, std::string("depth service response: ") + e.what());
    }
    return out;
  }

 private:
  RemoteEndpoint ep_;
};

class RemoteSegmentation final : public SegmentationClient {
 public:
  explicit RemoteSegmentation(RemoteEndpoint ep) : ep_(std::move(ep)) {}
  Mask segment(const Image& image, const std::string& prompt) override {
    constexpr auto code = ErrorCode::SegmentServiceError;
    const Target t = resolve_target(ep_, code);
    const httplib::MultipartFormDataItems items = {
        {"image", as_string(encode_png(image)), "image.png", "image/png"},
        {"prompt", prompt, "", "text/plain"},
    };
    const auto& r = checked(make_client(t, ep_)->Post(t.path, items), code, "segmentation service");
    try {
      const Image png = decode_png({reinterpret_cast<const std::uint8_t*>(r.body.data()), r.body.size()});
      Mask mask{Bitmap(png.width(), png.height()), prompt};
      for (int y = 0; y < png.height(); ++y)
        for (int x = 0; x < png.width(); ++x) mask.bitmap(x, y) = png(x, y).r >= 128 && png(x, y).a >= 128;
      return mask;
    } catch (const Error& e) {
      fail(code, std::string("segmentation response: ") + e.what());
    }
  }

 private:
  RemoteEndpoint ep_;
};

class RemoteLandmarks final : public LandmarkClient {
 public:
  explicit RemoteLandmarks(RemoteEndpoint ep) : ep_(std::move(ep)) {}
  std::vector<Landmark2D> detect(const Image& image, const Mask& mask, BodyKind kind) override {
    constexpr auto code = ErrorCode::LandmarkServiceError;
    const Target t = resolve_target(ep_, code);
    Image mask_png(mask.bitmap.width(), mask.bitmap.height());
    for (int y = 0; y < mask_png.height(); ++y)
      for (int x = 0; x < mask_png.width(); ++x) {
        const std::uint8_t v = mask.bitmap(x, y) ? 255 : 0;
        mask_png(x, y) = {v, v, v, 255};
      }
    const httplib::MultipartFormDataItems items = {
        {"image", as_string(encode_png(image)), "image.png", "image/png"},
        {"mask", as_string(encode_png(mask_png)), "mask.png", "image/png"},
        {"kind", kind == BodyKind::Face ? "face" : "skeleton", "", "text/plain"},
    };
    const auto& r = checked(make_client(t, ep_)->Post(t.path, items), code, "landmark service");
    const Json j = parse_body(r.body, code, "landmark service");
    std::vector<Landmark2D> out;
    try {
      for (const auto& l : j.at("landmarks"))
        out.push_back({l.at("name").get<std::string>(), l.at("u").get<double>(), l.at("v").get<double>()});
    } catch (const Json::exception& e) {
      fail(code, std::string("landmark response: ") + e.what());
    }
    return out;
  }

 private:
  RemoteEndpoint ep_;
};

class RemotePrograms final : public ProgramClient {
 public:
  explicit RemotePrograms(RemoteEndpoint ep) : ep_(std::move(ep)) {}
  std::vector<GeneratedProgram> generate(const Image& image, std::span<const std::uint8_t> encoded,
                                         const std::string& prompt) override {
    constexpr auto code = ErrorCode::ProgramServiceError;
    const Target t = resolve_target(ep_, code);
    const Bytes fallback = encoded.empty() ? encode_png(image) : Bytes{};
    const auto bytes = encoded.empty() ? std::span<const std::uint8_t>(fallback) : encoded;
    const Json request = {{"prompt", prompt}, {"image_base64", base64_encode(bytes)}};
    const auto& r = checked(make_client(t, ep_)->Post(t.path, request.dump(), "application/json"), code,
                            "program service");
    const Json j = parse_body(r.body, code, "program service");
    std::vector<GeneratedProgram> out;
    try {
      for (const auto& p : j.at("programs"))
        out.push_back({p.at("text").get<std::string>(), p.value("rationale", std::string{})});
    } catch (const Json::exception& e) {
      fail(code, std::string("program response: ") + e.what());
    }
    return out;
  }

 private:
  RemoteEndpoint ep_;
};

}  // namespace

ServiceBundle make_remote_services(const RemoteConfig& config) {
  return {std::make_shared<RemoteDepth>(config.depth), std::make_shared<RemoteSegmentation>(config.segment),
          std::make_shared<RemoteLandmarks>(config.landmark), std::make_shared<RemotePrograms>(config.program)};
}

}  // namespace parallax
