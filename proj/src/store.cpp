#include "parallax/store.hpp"

#include "parallax/crypto.hpp"
#include "parallax/error.hpp"
#include "parallax/image_io.hpp"
#include "parallax/scene_io.hpp"

namespace parallax {
namespace fs = std::filesystem;

namespace {

constexpr const char* kUploadFile = "upload.bin";
constexpr const char* kPipelineFile = "pipeline.json";

bool valid_id(const std::string& id) {
  return !id.empty() && id.size() <= 64 &&
         std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; });
}

void require_id(const std::string& id, const char* what) {
  if (!valid_id(id)) fail(ErrorCode::NotFound, std::string(what) + " '" + id + "' not found");
}

std::string read_text(const fs::path& path) {
  const Bytes b = read_file(path.string());
  return {b.begin(), b.end()};
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  write_file_atomic(path.string(), {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

}  // namespace

std::string scene_id_for_upload(std::span<const std::uint8_t> upload) {
  return "scene_" + sha256_hex(upload).substr(0, 16);
}

DocumentStore::DocumentStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "scenes", ec);
  fs::create_directories(root_ / "documents", ec);
  if (!fs::is_directory(root_ / "scenes") || !fs::is_directory(root_ / "documents"))
    fail(ErrorCode::IoError, "cannot create document store at " + root_.string());
}

fs::path DocumentStore::scene_dir(const std::string& scene_id) const { return root_ / "scenes" / scene_id; }

fs::path DocumentStore::document_path(const std::string& doc_id) const {
  return root_ / "documents" / (doc_id + ".json");
}

std::string DocumentStore::put_scene(const DepthScene& scene, std::span<const std::uint8_t> upload) {
  const std::string id = scene_id_for_upload(upload);
  std::lock_guard lock(mutex_);
  const fs::path dir = scene_dir(id);
  if (!fs::exists(dir / kUploadFile)) {
    const fs::path tmp = root_ / "scenes" / (id + ".tmp");
    fs::remove_all(tmp);
    save_scene_dir(scene, tmp.string());
    write_file((tmp / kUploadFile).string(), upload);
    fs::remove_all(dir);
    fs::rename(tmp, dir);
  }
  scenes_[id] = std::make_shared<const DepthScene>(scene);
  return id;
}

bool DocumentStore::has_scene(const std::string& scene_id) const {
  return valid_id(scene_id) && fs::exists(scene_dir(scene_id) / kUploadFile);
}

std::shared_ptr<const DepthScene> DocumentStore::scene(const std::string& scene_id) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = scenes_.find(scene_id); it != scenes_.end()) return it->second;
  }
  if (!has_scene(scene_id)) fail(ErrorCode::NotFound, "scene '" + scene_id + "' not found");
  auto loaded = std::make_shared<const DepthScene>(load_scene_dir(scene_dir(scene_id).string()));
  std::lock_guard lock(mutex_);
  return scenes_.emplace(scene_id, std::move(loaded)).first->second;
}

Bytes DocumentStore::scene_upload(const std::string& scene_id) const {
  if (!has_scene(scene_id)) fail(ErrorCode::NotFound, "scene '" + scene_id + "' not found");
  return read_file((scene_dir(scene_id) / kUploadFile).string());
}

void DocumentStore::put_pipeline(const std::string& scene_id, const SceneDocument& anchors_doc,
                                 const PipelineReport& report) {
  require_id(scene_id, "scene");
  const Json j = {{"document", to_json(anchors_doc)}, {"report", to_json(report)}};
  write_text_atomic(scene_dir(scene_id) / kPipelineFile, j.dump(2) + "\n");
}

std::optional<SceneDocument> DocumentStore::pipeline_document(const std::string& scene_id) const {
  if (!valid_id(scene_id)) return std::nullopt;
  const fs::path path = scene_dir(scene_id) / kPipelineFile;
  if (!fs::exists(path)) return std::nullopt;
  return document_from_json(Json::parse(read_text(path)).at("document"));
}

std::string DocumentStore::create_document(const std::string& scene_id, std::vector<ParametricAnchor> anchors,
                                           std::map<std::string, vpdsl::Provenance> provenance) {
  if (!has_scene(scene_id)) fail(ErrorCode::NotFound, "scene '" + scene_id + "' not found");
  SceneDocument doc;
  doc.id = next_id("doc");
  doc.scene_id = scene_id;
  doc.anchors = std::move(anchors);
  doc.provenance = std::move(provenance);
  save_document(doc);
  return doc.id;
}

SceneDocument DocumentStore::load_document(const std::string& doc_id) const {
  require_id(doc_id, "document");
  const fs::path path = document_path(doc_id);
  if (!fs::exists(path)) fail(ErrorCode::NotFound, "document '" + doc_id + "' not found");
  return decode_document(read_text(path));
}

void DocumentStore::save_document(const SceneDocument& doc) {
  require_id(doc.id, "document");
  write_text_atomic(document_path(doc.id), encode_document(doc));
}

std::shared_ptr<std::shared_mutex> DocumentStore::document_lock(const std::string& doc_id) {
  std::lock_guard lock(mutex_);
  auto& slot = locks_[doc_id];
  if (!slot) slot = std::make_shared<std::shared_mutex>();
  return slot;
}

std::string DocumentStore::next_id(const std::string& prefix) {
  std::lock_guard lock(mutex_);
  for (std::size_t n = 1;; ++n) {
    std::string id = prefix + "_" + std::to_string(n);
    if (fs::exists(document_path(id)) || reserved_.count(id)) continue;
    reserved_.insert(id);
    return id;
  }
}

}  // namespace parallax
