#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include "parallax/services.hpp"

namespace parallax {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path store;
  ServiceBundle services;
  unsigned workers = 4;
};

/// HTTP front end over the pipeline and document store.
///
///   POST  /scenes                      multipart "image" -> 201 {"scene_id"}
///   GET   /scenes/{id}                 scene summary
///   POST  /scenes/{id}/pipeline?seed=N PipelineReport
///   GET   /scenes/{id}/anchors         anchors of the last pipeline run
///   POST  /documents                   {"scene_id"} -> 201 {"document_id"}
///   GET   /documents/{id}              document JSON
///   PATCH /documents/{id}              {"layers":[ids in new order]} / {"remove_layer":id}
///   POST  /documents/{id}/layers       {"anchor_id", "content_png_base64"?} -> 201 {"layer_id"}
///   PATCH /documents/{id}/layers/{lid} {"param","delta"} and/or {"set":{layer fields}}
///   GET   /documents/{id}/render?supersample=N&overlay=A  image/png
///   GET   /health
class ApiServer {
 public:
  explicit ApiServer(ServerConfig config);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds (port 0 picks a free port). Throws IoError on bind failure.
  int bind();
  /// Blocks until stop().
  void listen();
  void stop();
  [[nodiscard]] int port() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Validates config, binds and serves until the process is stopped.
void serve_api(const ServerConfig& config);

}  // namespace parallax
