#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "parallax/document.hpp"
#include "parallax/pipeline.hpp"
#include "parallax/scene.hpp"

namespace parallax {

/// Scene id assigned to an upload: derived from its bytes, so re-uploads coincide.
std::string scene_id_for_upload(std::span<const std::uint8_t> upload);

/// On-disk store: scenes/<id>/ scene containers (plus the originally uploaded
/// bytes), documents/<id>.json written by atomic rename.
class DocumentStore {
 public:
  explicit DocumentStore(std::filesystem::path root);

  [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
  [[nodiscard]] std::filesystem::path scene_dir(const std::string& scene_id) const;
  [[nodiscard]] std::filesystem::path document_path(const std::string& doc_id) const;

  std::string put_scene(const DepthScene& scene, std::span<const std::uint8_t> upload);
  [[nodiscard]] bool has_scene(const std::string& scene_id) const;
  /// Cached in memory after the first load. Throws NotFound.
  std::shared_ptr<const DepthScene> scene(const std::string& scene_id);
  Bytes scene_upload(const std::string& scene_id) const;

  void put_pipeline(const std::string& scene_id, const SceneDocument& anchors_doc,
                    const PipelineReport& report);
  std::optional<SceneDocument> pipeline_document(const std::string& scene_id) const;

  std::string create_document(const std::string& scene_id, std::vector<ParametricAnchor> anchors,
                              std::map<std::string, vpdsl::Provenance> provenance);
  SceneDocument load_document(const std::string& doc_id) const;
  void save_document(const SceneDocument& doc);

  /// Per-document writer lock.
  std::shared_ptr<std::shared_mutex> document_lock(const std::string& doc_id);

 private:
  std::string next_id(const std::string& prefix);

  std::filesystem::path root_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const DepthScene>> scenes_;
  std::map<std::string, std::shared_ptr<std::shared_mutex>> locks_;
  std::set<std::string> reserved_;
};

}  // namespace parallax
