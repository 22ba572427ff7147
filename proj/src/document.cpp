#include "parallax/document.hpp"

#include <set>

#include "parallax/crypto.hpp"
#include "parallax/error.hpp"
#include "parallax/image_io.hpp"

namespace parallax {
namespace {

Json vec(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }
Json vec(const Eigen::Vector2d& v) { return Json::array({v.x(), v.y()}); }

template <int N>
Eigen::Matrix<double, N, 1> vec_from(const Json& j, const char* key) {
  const Json& a = j.at(key);
  if (!a.is_array() || a.size() != N)
    fail(ErrorCode::FormatError, std::string("'") + key + "' must be an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = a.at(i).get<double>();
  return v;
}

// Wraps nlohmann exceptions so malformed input surfaces as FormatError.
template <class F>
auto parse_guard(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    fail(ErrorCode::FormatError, e.what());
  }
}

AnchorKind kind_from(const std::string& name) {
  if (name == "Planar") return AnchorKind::Planar;
  if (name == "Cylindrical") return AnchorKind::Cylindrical;
  if (name == "Spherical") return AnchorKind::Spherical;
  fail(ErrorCode::FormatError, "unknown anchor kind '" + name + "'");
}

Json params_to_json(const AnchorParams& params) {
  struct Visitor {
    Json operator()(const PlanarParams& p) const {
      return {{"offset", p.offset}, {"uv_center", vec(p.uv_center)}, {"uv_scale", vec(p.uv_scale)},
              {"rotation", p.rotation}, {"size", vec(p.size)}};
    }
    Json operator()(const CylindricalParams& p) const {
      return {{"radius_scale", p.radius_scale}, {"height_offset", p.height_offset},
              {"angular_offset", p.angular_offset}, {"band_height", p.band_height}, {"arc_span", p.arc_span}};
    }
    Json operator()(const SphericalParams& p) const {
      return {{"radius_scale", p.radius_scale}, {"latitude_center", p.latitude_center},
              {"longitude_center", p.longitude_center}, {"band_extent", p.band_extent}};
    }
  };
  return std::visit(Visitor{}, params);
}

AnchorParams params_from_json(AnchorKind kind, const Json& j) {
  switch (kind) {
    case AnchorKind::Planar:
      return PlanarParams{j.at("offset").get<double>(), vec_from<2>(j, "uv_center"), vec_from<2>(j, "uv_scale"),
                          j.at("rotation").get<double>(), vec_from<2>(j, "size")};
    case AnchorKind::Cylindrical:
      return CylindricalParams{j.at("radius_scale").get<double>(), j.at("height_offset").get<double>(),
                               j.at("angular_offset").get<double>(), j.at("band_height").get<double>(),
                               j.at("arc_span").get<double>()};
    case AnchorKind::Spherical:
      return SphericalParams{j.at("radius_scale").get<double>(), j.at("latitude_center").get<double>(),
                             j.at("longitude_center").get<double>(), j.at("band_extent").get<double>()};
  }
  fail(ErrorCode::FormatError, "unknown anchor kind");
}

}  // namespace

const ParametricAnchor* SceneDocument::find_anchor(const std::string& anchor_id) const {
  for (const auto& a : anchors)
    if (a.id == anchor_id) return &a;
  return nullptr;
}

ParametricAnchor* SceneDocument::find_anchor(const std::string& anchor_id) {
  return const_cast<ParametricAnchor*>(std::as_const(*this).find_anchor(anchor_id));
}

ContentLayer* SceneDocument::find_layer(const std::string& layer_id) {
  for (auto& l : layers)
    if (l.id == layer_id) return &l;
  return nullptr;
}

std::vector<std::string> validate_document(const SceneDocument& doc) {
  std::vector<std::string> problems;
  std::set<std::string> ids;
  for (const auto& a : doc.anchors) {
    if (!ids.insert(a.id).second) problems.push_back("duplicate anchor id '" + a.id + "'");
    const bool matches = (a.kind == AnchorKind::Planar && std::holds_alternative<Plane>(a.geometry) &&
                          std::holds_alternative<PlanarParams>(a.free_params)) ||
                         (a.kind == AnchorKind::Cylindrical && std::holds_alternative<Cylinder>(a.geometry) &&
                          std::holds_alternative<CylindricalParams>(a.free_params)) ||
                         (a.kind == AnchorKind::Spherical && std::holds_alternative<Sphere>(a.geometry) &&
                          std::holds_alternative<SphericalParams>(a.free_params));
    if (!matches) problems.push_back("anchor '" + a.id + "' kind does not match its geometry or params");
  }
  std::set<std::string> layer_ids;
  for (const auto& l : doc.layers) {
    if (!layer_ids.insert(l.id).second) problems.push_back("duplicate layer id '" + l.id + "'");
    if (!ids.count(l.anchor_id)) problems.push_back("layer '" + l.id + "' references unknown anchor '" + l.anchor_id + "'");
    if (l.content.empty()) problems.push_back("layer '" + l.id + "' has empty content");
    if (l.repeat[0] < 1 || l.repeat[1] < 1) problems.push_back("layer '" + l.id + "' repeat must be >= 1");
    if (l.gap[0] < 0.0 || l.gap[1] < 0.0) problems.push_back("layer '" + l.id + "' gap must be >= 0");
  }
  return problems;
}

Json to_json(const Plane& plane) {
  return {{"normal", vec(plane.normal)}, {"d", plane.d}, {"centroid", vec(plane.centroid)},
          {"primary_dir", vec(plane.primary_dir)}, {"extent", vec(plane.extent)}};
}

Json to_json(const Cylinder& cylinder) {
  return {{"axis_point", vec(cylinder.axis_point)}, {"axis_dir", vec(cylinder.axis_dir)},
          {"radius", cylinder.radius}, {"half_height", cylinder.half_height}};
}

Json to_json(const Sphere& sphere) { return {{"center", vec(sphere.center)}, {"radius", sphere.radius}}; }

Json geometry_to_json(const AnchorGeometry& geometry) {
  struct Visitor {
    Json operator()(const Plane& p) const { return {{"kind", "plane"}, {"params", to_json(p)}}; }
    Json operator()(const Cylinder& c) const { return {{"kind", "cylinder"}, {"params", to_json(c)}}; }
    Json operator()(const Sphere& s) const { return {{"kind", "sphere"}, {"params", to_json(s)}}; }
  };
  return std::visit(Visitor{}, geometry);
}

AnchorGeometry geometry_from_json(const Json& j) {
  return parse_guard([&]() -> AnchorGeometry {
    const std::string kind = j.at("kind").get<std::string>();
    const Json& p = j.at("params");
    if (kind == "plane")
      return Plane{vec_from<3>(p, "normal"), p.at("d").get<double>(), vec_from<3>(p, "centroid"),
                   vec_from<3>(p, "primary_dir"), vec_from<2>(p, "extent")};
    if (kind == "cylinder")
      return Cylinder{vec_from<3>(p, "axis_point"), vec_from<3>(p, "axis_dir"), p.at("radius").get<double>(),
                      p.at("half_height").get<double>()};
    if (kind == "sphere") return Sphere{vec_from<3>(p, "center"), p.at("radius").get<double>()};
    fail(ErrorCode::FormatError, "unknown geometry kind '" + kind + "'");
  });
}

Json to_json(const ParametricAnchor& anchor) {
  return {{"id", anchor.id},
          {"kind", std::string(to_string(anchor.kind))},
          {"geometry", geometry_to_json(anchor.geometry)},
          {"rationale", anchor.rationale},
          {"free_params", params_to_json(anchor.free_params)}};
}

ParametricAnchor anchor_from_json(const Json& j) {
  return parse_guard([&] {
    ParametricAnchor a;
    a.id = j.at("id").get<std::string>();
    a.kind = kind_from(j.at("kind").get<std::string>());
    a.geometry = geometry_from_json(j.at("geometry"));
    a.rationale = j.value("rationale", std::string{});
    a.free_params = params_from_json(a.kind, j.at("free_params"));
    return a;
  });
}

Json to_json(const ContentLayer& layer) {
  return {{"id", layer.id},
          {"anchor_id", layer.anchor_id},
          {"content", base64_encode(encode_png(layer.content))},
          {"repeat", Json::array({layer.repeat[0], layer.repeat[1]})},
          {"gap", Json::array({layer.gap[0], layer.gap[1]})},
          {"mirror", layer.mirror},
          {"content_rotation", layer.content_rotation},
          {"visible", layer.visible},
          {"double_sided", layer.double_sided}};
}

ContentLayer layer_from_json(const Json& j) {
  return parse_guard([&] {
    ContentLayer l;
    l.id = j.at("id").get<std::string>();
    l.anchor_id = j.at("anchor_id").get<std::string>();
    l.content = decode_png(base64_decode(j.at("content").get<std::string>()));
    if (j.contains("repeat")) l.repeat = {j["repeat"].at(0).get<int>(), j["repeat"].at(1).get<int>()};
    if (j.contains("gap")) l.gap = {j["gap"].at(0).get<double>(), j["gap"].at(1).get<double>()};
    l.mirror = j.value("mirror", false);
    l.content_rotation = j.value("content_rotation", 0.0);
    l.visible = j.value("visible", true);
    l.double_sided = j.value("double_sided", true);
    return l;
  });
}

Json to_json(const SceneDocument& doc) {
  Json anchors = Json::array();
  for (const auto& a : doc.anchors) anchors.push_back(to_json(a));
  Json layers = Json::array();
  for (const auto& l : doc.layers) layers.push_back(to_json(l));
  Json provenance = Json::object();
  for (const auto& [id, p] : doc.provenance)
    provenance[id] = {{"program_text", p.program_text}, {"rationale", p.rationale}};
  return {{"id", doc.id}, {"scene_id", doc.scene_id}, {"anchors", anchors}, {"layers", layers},
          {"provenance", provenance}};
}

SceneDocument document_from_json(const Json& j) {
  return parse_guard([&] {
    SceneDocument doc;
    doc.id = j.value("id", std::string{});
    doc.scene_id = j.value("scene_id", std::string{});
    for (const auto& a : j.value("anchors", Json::array())) doc.anchors.push_back(anchor_from_json(a));
    for (const auto& l : j.value("layers", Json::array())) doc.layers.push_back(layer_from_json(l));
    const Json provenance = j.value("provenance", Json::object());
    for (const auto& [id, p] : provenance.items())
      doc.provenance[id] = {p.value("program_text", std::string{}), p.value("rationale", std::string{})};
    return doc;
  });
}

std::string encode_document(const SceneDocument& doc) { return to_json(doc).dump(2) + "\n"; }

SceneDocument decode_document(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::FormatError, std::string("document is not valid JSON: ") + e.what());
  }
  return document_from_json(j);
}

std::string encode_anchors(const std::vector<ParametricAnchor>& anchors) {
  Json out = Json::array();
  for (const auto& a : anchors) out.push_back(to_json(a));
  return out.dump(2) + "\n";
}

}  // namespace parallax
