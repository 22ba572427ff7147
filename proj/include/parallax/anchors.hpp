#pragma once

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "parallax/geometry.hpp"
#include "parallax/raster.hpp"

namespace parallax {

enum class AnchorKind { Planar, Cylindrical, Spherical };

std::string_view to_string(AnchorKind kind) noexcept;

struct PlanarParams {
  double offset = 0.0;
  Eigen::Vector2d uv_center = Eigen::Vector2d::Zero();
  Eigen::Vector2d uv_scale = Eigen::Vector2d::Ones();
  double rotation = 0.0;
  Eigen::Vector2d size = Eigen::Vector2d::Ones();

  friend bool operator==(const PlanarParams&, const PlanarParams&) = default;
};

struct CylindricalParams {
  double radius_scale = 1.0;
  double height_offset = 0.0;
  double angular_offset = 0.0;
  double band_height = 1.0;
  double arc_span = 2.0 * 3.14159265358979323846;

  friend bool operator==(const CylindricalParams&, const CylindricalParams&) = default;
};

struct SphericalParams {
  double radius_scale = 1.0;
  double latitude_center = 0.0;
  double longitude_center = 0.0;
  double band_extent = 3.14159265358979323846 / 3.0;

  friend bool operator==(const SphericalParams&, const SphericalParams&) = default;
};

using AnchorParams = std::variant<PlanarParams, CylindricalParams, SphericalParams>;
using AnchorGeometry = std::variant<Plane, Cylinder, Sphere>;

struct ParametricAnchor {
  std::string id;
  AnchorKind kind = AnchorKind::Planar;
  AnchorGeometry geometry;
  std::string rationale;
  AnchorParams free_params;

  friend bool operator==(const ParametricAnchor&, const ParametricAnchor&) = default;
};

/// Placeholder state: the anchor hugs the fitted primitive.
ParametricAnchor make_planar_anchor(std::string id, const Plane& plane, std::string rationale = {});
ParametricAnchor make_cylindrical_anchor(std::string id, const Cylinder& cylinder,
                                         std::string rationale = {});
ParametricAnchor make_spherical_anchor(std::string id, const Sphere& sphere,
                                       std::string rationale = {});

/// Parameter names accepted by apply_constrained_edit for a kind.
std::vector<std::string_view> editable_params(AnchorKind kind);

/// Adds `delta` to one free parameter, clamping to its valid range. The fitted
/// geometry never changes. Throws UnknownParam.
ParametricAnchor apply_constrained_edit(const ParametricAnchor& anchor, std::string_view param,
                                        double delta);

inline constexpr double kMinScale = 1e-3;
inline constexpr double kMinLength = 1e-6;

struct ContentLayer {
  std::string id;
  std::string anchor_id;
  Image content;
  std::array<int, 2> repeat{1, 1};
  std::array<double, 2> gap{0.0, 0.0};
  bool mirror = false;
  double content_rotation = 0.0;
  bool visible = true;
  bool double_sided = true;

  friend bool operator==(const ContentLayer&, const ContentLayer&) = default;
};

/// Planes render double-sided by default; wrap-around surfaces cull back faces.
bool default_double_sided(AnchorKind kind) noexcept;

struct SurfaceMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Eigen::Vector2d> uvs;
  std::vector<std::array<int, 3>> triangles;
};

/// Tessellates the anchor's content surface. UVs cover [0,1]^2 with t running
/// toward the surface's up direction; front faces wind counter-clockwise as
/// seen from outside (cylinder/sphere) or from the normal side (plane).
SurfaceMesh build_surface_mesh(const ParametricAnchor& anchor, int tessellation);

/// Maps a surface UV to the content UV sampled there (planar uv_center /
/// uv_scale placement; identity for the other kinds).
Eigen::Vector2d surface_to_content_uv(const ParametricAnchor& anchor, const Eigen::Vector2d& uv);

/// Tiles the layer's content: nu x nv cells, each cell the content plus a
/// transparent gap margin, odd columns mirrored when `mirror` is set, each
/// tile rotated about its center.
Image compose_layer_texture(const ContentLayer& layer);

}  // namespace parallax
