#include "parallax/server.hpp"

#include <atomic>

#include "parallax/crypto.hpp"
#include "parallax/document.hpp"
#include "parallax/error.hpp"
#include "parallax/pipeline.hpp"
#include "parallax/render.hpp"
#include "parallax/store.hpp"
#include "resources/embedded.hpp"

// After Eigen: <resolv.h> defines a `_res` macro that collides with Eigen internals.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace parallax {
namespace {

constexpr const char* kId = "([A-Za-z0-9_-]+)";
constexpr std::size_t kMaxUpload = 64u << 20;
constexpr int kMaxSupersample = 8;

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::FixtureMissing: return 422;
    case ErrorCode::DepthServiceError:
    case ErrorCode::SegmentServiceError:
    case ErrorCode::LandmarkServiceError:
    case ErrorCode::ProgramServiceError: return 502;
    case ErrorCode::IoError:
    case ErrorCode::EncodeError: return 500;
    default: return 400;
  }
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send_json(res, status, {{"error", code}, {"message", message}});
}

Json parse_json_body(const httplib::Request& req) {
  try {
    return req.body.empty() ? Json::object() : Json::parse(req.body);
  } catch (const Json::exception& e) {
    fail(ErrorCode::FormatError, std::string("request body is not valid JSON: ") + e.what());
  }
}

std::uint64_t seed_param(const httplib::Request& req) {
  if (!req.has_param("seed")) return 0;
  const std::string s = req.get_param_value("seed");
  // stoull accepts a leading '-' and wraps; only plain digits are valid.
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    fail(ErrorCode::InvalidArgument, "seed must be a non-negative integer");
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidArgument, "seed must be a non-negative integer");
  }
}

Bytes upload_bytes(const httplib::Request& req) {
  if (req.is_multipart_form_data()) {
    if (!req.has_file("image")) fail(ErrorCode::InvalidArgument, "multipart field 'image' is required");
    const std::string& content = req.get_file_value("image").content;
    return {content.begin(), content.end()};
  }
  if (req.body.empty()) fail(ErrorCode::InvalidArgument, "request has no image");
  return {req.body.begin(), req.body.end()};
}

Image decode_content(const std::string& base64) {
  return decode_image(base64_decode(base64));
}

void apply_layer_fields(ContentLayer& layer, const Json& set) {
  for (const auto& [key, value] : set.items()) {
    if (key == "repeat") {
      layer.repeat = {value.at(0).get<int>(), value.at(1).get<int>()};
      if (layer.repeat[0] < 1 || layer.repeat[1] < 1) fail(ErrorCode::InvalidArgument, "repeat counts must be >= 1");
    } else if (key == "gap") {
      layer.gap = {value.at(0).get<double>(), value.at(1).get<double>()};
      if (layer.gap[0] < 0.0 || layer.gap[1] < 0.0) fail(ErrorCode::InvalidArgument, "gap must be >= 0");
    } else if (key == "mirror") {
      layer.mirror = value.get<bool>();
    } else if (key == "content_rotation") {
      layer.content_rotation = value.get<double>();
    } else if (key == "visible") {
      layer.visible = value.get<bool>();
    } else if (key == "double_sided") {
      layer.double_sided = value.get<bool>();
    } else if (key == "content_png_base64") {
      layer.content = decode_content(value.get<std::string>());
    } else if (key == "asset") {
      if (value.get<std::string>() != "placeholder") fail(ErrorCode::InvalidArgument, "unknown asset '" + value.get<std::string>() + "'");
      layer.content = decode_png(resources::bytes(resources::Resource::PlaceholderText));
    } else {
      fail(ErrorCode::InvalidArgument, "unknown layer field '" + key + "'");
    }
  }
}

}  // namespace

struct ApiServer::Impl {
  ServerConfig config;
  DocumentStore store;
  httplib::Server server;
  std::atomic<int> port{0};

  explicit Impl(ServerConfig c) : config(std::move(c)), store(config.store) { routes(); }

  // Runs a handler, mapping engine errors onto HTTP statuses.
  template <class F>
  httplib::Server::Handler guarded(F f) {
    return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const Error& e) {
        send_error(res, status_for(e.code()), std::string(to_string(e.code())), e.what());
      } catch (const Json::exception& e) {
        send_error(res, 400, "FormatError", e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "InternalError", e.what());
      }
    };
  }

  void run_and_store(const std::string& scene_id, const DepthScene& scene, std::span<const std::uint8_t> bytes,
                     std::uint64_t seed, PipelineReport& report) {
    SceneDocument anchors_doc;
    anchors_doc.scene_id = scene_id;
    extract_anchors(scene, bytes, config.services, {seed, config.workers}, anchors_doc, report);
    store.put_pipeline(scene_id, anchors_doc, report);
  }

  void routes() {
    server.set_payload_max_length(kMaxUpload);

    server.Get("/health", guarded([](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}});
    }));

    server.Post("/scenes", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Bytes bytes = upload_bytes(req);
      const std::uint64_t seed = seed_param(req);
      const auto start = std::chrono::steady_clock::now();
      DepthScene scene = ingest_image(bytes, config.services);
      PipelineReport report;
      report.stages.depth = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const std::string id = store.put_scene(scene, bytes);
      run_and_store(id, scene, bytes, seed, report);
      report.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      send_json(res, 201, {{"scene_id", id}, {"report", to_json(report)}});
    }));

    server.Get(std::string("/scenes/") + kId, guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      const auto scene = store.scene(id);
      const PinholeCamera& c = scene->camera;
      send_json(res, 200,
                {{"scene_id", id},
                 {"width", scene->width()},
                 {"height", scene->height()},
                 {"camera", {{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy}, {"width", c.width}, {"height", c.height}}},
                 {"has_pipeline", store.pipeline_document(id).has_value()}});
    }));

    server.Post(std::string("/scenes/") + kId + "/pipeline",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const std::string id = req.matches[1];
                  const auto scene = store.scene(id);
                  const Bytes bytes = store.scene_upload(id);
                  const auto start = std::chrono::steady_clock::now();
                  PipelineReport report;
                  run_and_store(id, *scene, bytes, seed_param(req), report);
                  report.total_seconds =
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                  send_json(res, 200, to_json(report));
                }));

    server.Get(std::string("/scenes/") + kId + "/anchors",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 if (!store.has_scene(id)) fail(ErrorCode::NotFound, "scene '" + id + "' not found");
                 const auto doc = store.pipeline_document(id);
                 if (!doc) fail(ErrorCode::NotFound, "scene '" + id + "' has no pipeline result");
                 res.status = 200;
                 res.set_content(encode_anchors(doc->anchors), "application/json");
               }));

    server.Post("/documents", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Json body = parse_json_body(req);
      const std::string scene_id = body.at("scene_id").get<std::string>();
      if (!store.has_scene(scene_id)) fail(ErrorCode::NotFound, "scene '" + scene_id + "' not found");
      auto anchors = store.pipeline_document(scene_id);
      const std::string id = anchors ? store.create_document(scene_id, anchors->anchors, anchors->provenance)
                                     : store.create_document(scene_id, {}, {});
      send_json(res, 201, {{"document_id", id}});
    }));

    server.Get(std::string("/documents/") + kId, guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      const auto lock = store.document_lock(id);
      std::shared_lock guard(*lock);
      res.status = 200;
      res.set_content(encode_document(store.load_document(id)), "application/json");
    }));

    server.Patch(std::string("/documents/") + kId, guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      const Json body = parse_json_body(req);
      const auto lock = store.document_lock(id);
      std::unique_lock guard(*lock);
      SceneDocument doc = store.load_document(id);
      if (body.contains("remove_layer")) {
        const std::string lid = body.at("remove_layer").get<std::string>();
        const auto it = std::find_if(doc.layers.begin(), doc.layers.end(), [&](const auto& l) { return l.id == lid; });
        if (it == doc.layers.end()) fail(ErrorCode::NotFound, "layer '" + lid + "' not found");
        doc.layers.erase(it);
      }
      if (body.contains("layers")) {
        const auto order = body.at("layers").get<std::vector<std::string>>();
        if (order.size() != doc.layers.size()) fail(ErrorCode::InvalidArgument, "layer order must list every layer once");
        std::vector<ContentLayer> reordered;
        for (const auto& lid : order) {
          ContentLayer* l = doc.find_layer(lid);
          if (!l) fail(ErrorCode::NotFound, "layer '" + lid + "' not found");
          if (std::any_of(reordered.begin(), reordered.end(), [&](const auto& r) { return r.id == lid; }))
            fail(ErrorCode::InvalidArgument, "layer '" + lid + "' listed twice");
          reordered.push_back(*l);
        }
        doc.layers = std::move(reordered);
      }
      store.save_document(doc);
      res.status = 200;
      res.set_content(encode_document(doc), "application/json");
    }));

    server.Post(std::string("/documents/") + kId + "/layers",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const std::string id = req.matches[1];
                  Json body = parse_json_body(req);
                  const auto lock = store.document_lock(id);
                  std::unique_lock guard(*lock);
                  SceneDocument doc = store.load_document(id);
                  ContentLayer layer;
                  layer.anchor_id = body.at("anchor_id").get<std::string>();
                  const ParametricAnchor* anchor = doc.find_anchor(layer.anchor_id);
                  if (!anchor) fail(ErrorCode::NotFound, "anchor '" + layer.anchor_id + "' not found");
                  layer.double_sided = default_double_sided(anchor->kind);
                  layer.content = decode_png(resources::bytes(resources::Resource::PlaceholderText));
                  body.erase("anchor_id");
                  apply_layer_fields(layer, body);
                  for (std::size_t n = doc.layers.size() + 1;; ++n) {
                    layer.id = "layer_" + std::to_string(n);
                    if (!doc.find_layer(layer.id)) break;
                  }
                  doc.layers.push_back(layer);
                  store.save_document(doc);
                  send_json(res, 201, {{"layer_id", layer.id}});
                }));

    server.Patch(std::string("/documents/") + kId + "/layers/" + kId,
                 guarded([this](const httplib::Request& req, httplib::Response& res) {
                   const std::string id = req.matches[1];
                   const std::string lid = req.matches[2];
                   const Json body = parse_json_body(req);
                   const auto lock = store.document_lock(id);
                   std::unique_lock guard(*lock);
                   SceneDocument doc = store.load_document(id);
                   ContentLayer* layer = doc.find_layer(lid);
                   if (!layer) fail(ErrorCode::NotFound, "layer '" + lid + "' not found");
                   if (body.contains("set")) {
                     ContentLayer updated = *layer;
                     apply_layer_fields(updated, body.at("set"));
                     *layer = std::move(updated);
                   }
                   ParametricAnchor* anchor = doc.find_anchor(layer->anchor_id);
                   if (!anchor) fail(ErrorCode::NotFound, "anchor '" + layer->anchor_id + "' not found");
                   if (body.contains("param")) {
                     *anchor = apply_constrained_edit(*anchor, body.at("param").get<std::string>(),
                                                      body.at("delta").get<double>());
                   }
                   store.save_document(doc);
                   send_json(res, 200, {{"layer_id", lid}, {"anchor", to_json(*anchor)}});
                 }));

    server.Get(std::string("/documents/") + kId + "/render",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 RenderSettings settings;
                 if (req.has_param("supersample")) {
                   int ss = 0;
                   try {
                     ss = std::stoi(req.get_param_value("supersample"));
                   } catch (const std::exception&) {
                   }
                   if (ss < 1 || ss > kMaxSupersample)
                     fail(ErrorCode::InvalidArgument, "supersample must be an integer in [1, 8]");
                   settings.supersample = ss;
                 }
                 if (req.has_param("overlay")) settings.overlay_anchor = req.get_param_value("overlay");
                 SceneDocument doc;
                 {
                   const auto lock = store.document_lock(id);
                   std::shared_lock guard(*lock);
                   doc = store.load_document(id);
                 }
                 const auto scene = store.scene(doc.scene_id);
                 const Bytes png = export_png(render_document(doc, *scene, settings));
                 res.status = 200;
                 res.set_content(std::string(png.begin(), png.end()), "image/png");
               }));
  }
};

ApiServer::ApiServer(ServerConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  const unsigned n = std::max(1u, impl_->config.workers);
  impl_->server.new_task_queue = [n] { return new httplib::ThreadPool(std::max(n, 4u)); };
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind() {
  const auto& c = impl_->config;
  int port = c.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(c.host);
    if (port < 0) fail(ErrorCode::IoError, "cannot bind " + c.host);
  } else if (!impl_->server.bind_to_port(c.host, port)) {
    fail(ErrorCode::IoError, "cannot bind " + c.host + ":" + std::to_string(port));
  }
  impl_->port = port;
  return port;
}

void ApiServer::listen() { impl_->server.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_) impl_->server.stop();
}

int ApiServer::port() const noexcept { return impl_->port; }

void serve_api(const ServerConfig& config) {
  const ServiceBundle& s = config.services;
  if (!s.depth || !s.segment || !s.landmark || !s.program)
    fail(ErrorCode::InvalidArgument, "server needs all four model services configured");
  if (config.port < 0 || config.port > 65535) fail(ErrorCode::InvalidArgument, "port out of range");
  ApiServer server(config);
  server.bind();
  server.listen();
}

}  // namespace parallax
