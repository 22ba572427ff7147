#pragma once

#include <map>
#include <string>
#include <vector>

#include "parallax/json.hpp"

#include "parallax/anchors.hpp"
#include "parallax/vpdsl/interpreter.hpp"

namespace parallax {

/// Anchors and layers authored over one scene. The scene itself lives in a
/// scene container and is referenced by id.
struct SceneDocument {
  std::string id;
  std::string scene_id;
  std::vector<ParametricAnchor> anchors;
  std::vector<ContentLayer> layers;
  std::map<std::string, vpdsl::Provenance> provenance;  // by anchor id

  [[nodiscard]] const ParametricAnchor* find_anchor(const std::string& anchor_id) const;
  [[nodiscard]] ParametricAnchor* find_anchor(const std::string& anchor_id);
  [[nodiscard]] ContentLayer* find_layer(const std::string& layer_id);
};

/// Empty when the document is well-formed (unique anchor ids, every layer
/// bound to an existing anchor, nonempty layer rasters).
std::vector<std::string> validate_document(const SceneDocument& doc);

Json to_json(const Plane& plane);
Json to_json(const Cylinder& cylinder);
Json to_json(const Sphere& sphere);
/// {"kind":"plane|cylinder|sphere","params":{...}}
Json geometry_to_json(const AnchorGeometry& geometry);
AnchorGeometry geometry_from_json(const Json& j);

Json to_json(const ParametricAnchor& anchor);
ParametricAnchor anchor_from_json(const Json& j);

/// Layer content is embedded as base64 PNG.
Json to_json(const ContentLayer& layer);
ContentLayer layer_from_json(const Json& j);

Json to_json(const SceneDocument& doc);
SceneDocument document_from_json(const Json& j);

std::string encode_document(const SceneDocument& doc);
SceneDocument decode_document(const std::string& text);

/// Anchors array only, serialized; used to compare pipeline outputs.
std::string encode_anchors(const std::vector<ParametricAnchor>& anchors);

}  // namespace parallax
