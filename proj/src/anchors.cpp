#include "parallax/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "parallax/camera.hpp"
#include "parallax/error.hpp"

namespace parallax {
namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Vector3d perpendicular_to(const Eigen::Vector3d& axis) {
  const Eigen::Vector3d helper =
      std::abs(axis.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  return axis.cross(helper).normalized();
}

// Horizontal reference toward the camera for a wrap-around surface around
// `center` with vertical `up`.
Eigen::Vector3d facing_direction(const Eigen::Vector3d& center, const Eigen::Vector3d& up) {
  for (const Eigen::Vector3d& candidate : {Eigen::Vector3d(-center), Eigen::Vector3d(0.0, 0.0, -1.0)}) {
    const Eigen::Vector3d flat = candidate - candidate.dot(up) * up;
    if (flat.norm() > 1e-9 * (candidate.norm() + 1e-300)) return flat.normalized();
  }
  return perpendicular_to(up);
}

void add_grid_triangles(SurfaceMesh& mesh, int cols, int rows) {
  const int stride = cols + 1;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      const int a = j * stride + i;
      const int b = a + 1;
      const int c = a + stride + 1;
      const int d = a + stride;
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }
}

// Whether moving from `at` along `dir` moves down the image (v increasing).
bool points_down_on_screen(const Eigen::Vector3d& at, const Eigen::Vector3d& dir) {
  if (at.z() <= 0.0) return dir.dot(image_up()) < 0.0;
  return dir.y() * at.z() - at.y() * dir.z() > 0.0;
}

double snap(double v) {
  if (std::abs(v) < 1e-12) return 0.0;
  if (std::abs(v - 1.0) < 1e-12) return 1.0;
  if (std::abs(v + 1.0) < 1e-12) return -1.0;
  return v;
}

}  // namespace

std::string_view to_string(AnchorKind kind) noexcept {
  switch (kind) {
    case AnchorKind::Planar: return "Planar";
    case AnchorKind::Cylindrical: return "Cylindrical";
    case AnchorKind::Spherical: return "Spherical";
  }
  return "Planar";
}

bool default_double_sided(AnchorKind kind) noexcept { return kind == AnchorKind::Planar; }

ParametricAnchor make_planar_anchor(std::string id, const Plane& plane, std::string rationale) {
  PlanarParams params;
  params.size = plane.extent.cwiseMax(Eigen::Vector2d::Constant(kMinLength));
  return {std::move(id), AnchorKind::Planar, plane, std::move(rationale), params};
}

ParametricAnchor make_cylindrical_anchor(std::string id, const Cylinder& cylinder,
                                         std::string rationale) {
  CylindricalParams params;
  params.band_height = std::max(2.0 * cylinder.half_height, kMinLength);
  return {std::move(id), AnchorKind::Cylindrical, cylinder, std::move(rationale), params};
}

ParametricAnchor make_spherical_anchor(std::string id, const Sphere& sphere, std::string rationale) {
  return {std::move(id), AnchorKind::Spherical, sphere, std::move(rationale), SphericalParams{}};
}

std::vector<std::string_view> editable_params(AnchorKind kind) {
  switch (kind) {
    case AnchorKind::Planar:
      return {"offset", "uv_center_u", "uv_center_v", "uv_scale_u", "uv_scale_v", "rotation", "size_w", "size_h"};
    case AnchorKind::Cylindrical:
      return {"radius_scale", "height_offset", "angular_offset", "band_height", "arc_span"};
    case AnchorKind::Spherical:
      return {"radius_scale", "latitude_center", "longitude_center", "band_extent"};
  }
  return {};
}

ParametricAnchor apply_constrained_edit(const ParametricAnchor& anchor, std::string_view param,
                                        double delta) {
  if (!std::isfinite(delta)) fail(ErrorCode::InvalidArgument, "edit delta must be finite");
  ParametricAnchor out = anchor;
  auto unknown = [&]() {
    fail(ErrorCode::UnknownParam, "parameter '" + std::string(param) + "' is not editable on a " +
                                      std::string(to_string(anchor.kind)) + " anchor");
  };
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PlanarParams>) {
          if (param == "offset") p.offset += delta;
          else if (param == "uv_center_u") p.uv_center.x() += delta;
          else if (param == "uv_center_v") p.uv_center.y() += delta;
          else if (param == "uv_scale_u") p.uv_scale.x() = std::max(p.uv_scale.x() + delta, kMinScale);
          else if (param == "uv_scale_v") p.uv_scale.y() = std::max(p.uv_scale.y() + delta, kMinScale);
          else if (param == "rotation") p.rotation += delta;
          else if (param == "size_w") p.size.x() = std::max(p.size.x() + delta, kMinLength);
          else if (param == "size_h") p.size.y() = std::max(p.size.y() + delta, kMinLength);
          else unknown();
        } else if constexpr (std::is_same_v<T, CylindricalParams>) {
          if (param == "radius_scale") p.radius_scale = std::max(p.radius_scale + delta, kMinScale);
          else if (param == "height_offset") p.height_offset += delta;
          else if (param == "angular_offset") p.angular_offset += delta;
          else if (param == "band_height") p.band_height = std::max(p.band_height + delta, kMinLength);
          else if (param == "arc_span") p.arc_span = std::clamp(p.arc_span + delta, kMinScale, 2.0 * kPi);
          else unknown();
        } else {
          if (param == "radius_scale") p.radius_scale = std::max(p.radius_scale + delta, kMinScale);
          else if (param == "latitude_center") p.latitude_center = std::clamp(p.latitude_center + delta, -kPi / 2, kPi / 2);
          else if (param == "longitude_center") p.longitude_center += delta;
          else if (param == "band_extent") p.band_extent = std::clamp(p.band_extent + delta, kMinScale, kPi);
          else unknown();
        }
      },
      out.free_params);
  return out;
}

SurfaceMesh build_surface_mesh(const ParametricAnchor& anchor, int tessellation) {
  if (tessellation < 1) fail(ErrorCode::InvalidArgument, "tessellation must be >= 1");
  SurfaceMesh mesh;
  const Eigen::Vector3d up_image = image_up();

  if (const auto* plane = std::get_if<Plane>(&anchor.geometry)) {
    const auto& p = std::get<PlanarParams>(anchor.free_params);
    Eigen::Vector3d right = plane->primary_dir;
    Eigen::Vector3d up = plane->secondary_dir();
    if (points_down_on_screen(plane->centroid, up)) {
      right = -right;
      up = -up;
    }
    const double c = std::cos(p.rotation), s = std::sin(p.rotation);
    const Eigen::Vector3d e_s = c * right + s * up;
    const Eigen::Vector3d e_t = -s * right + c * up;
    const Eigen::Vector3d origin = plane->centroid + p.offset * plane->normal;
    const int n = tessellation;
    for (int j = 0; j <= n; ++j) {
      const double t = static_cast<double>(j) / n;
      for (int i = 0; i <= n; ++i) {
        const double u = static_cast<double>(i) / n;
        mesh.vertices.push_back(origin + (2.0 * u - 1.0) * p.size.x() * e_s + (2.0 * t - 1.0) * p.size.y() * e_t);
        mesh.uvs.emplace_back(u, t);
      }
    }
    add_grid_triangles(mesh, n, n);
  } else if (const auto* cyl = std::get_if<Cylinder>(&anchor.geometry)) {
    const auto& p = std::get<CylindricalParams>(anchor.free_params);
    const Eigen::Vector3d up = cyl->axis_dir.dot(up_image) >= 0.0 ? cyl->axis_dir : Eigen::Vector3d(-cyl->axis_dir);
    const Eigen::Vector3d front = facing_direction(cyl->axis_point, up);
    const Eigen::Vector3d east = up.cross(front);
    const double radius = cyl->radius * p.radius_scale;
    const int cols = tessellation;
    const int rows = std::max(1, tessellation / 4);
    for (int j = 0; j <= rows; ++j) {
      const double t = static_cast<double>(j) / rows;
      const double h = p.height_offset + (t - 0.5) * p.band_height;
      for (int i = 0; i <= cols; ++i) {
        const double u = static_cast<double>(i) / cols;
        const double theta = p.angular_offset + (u - 0.5) * p.arc_span;
        mesh.vertices.push_back(cyl->axis_point + h * up +
                                radius * (std::cos(theta) * front + std::sin(theta) * east));
        mesh.uvs.emplace_back(u, t);
      }
    }
    add_grid_triangles(mesh, cols, rows);
  } else {
    const auto& sphere = std::get<Sphere>(anchor.geometry);
    const auto& p = std::get<SphericalParams>(anchor.free_params);
    const Eigen::Vector3d up = up_image;
    const Eigen::Vector3d front = facing_direction(sphere.center, up);
    const Eigen::Vector3d east = up.cross(front);
    const double radius = sphere.radius * p.radius_scale;
    const double lat_lo = std::max(p.latitude_center - 0.5 * p.band_extent, -kPi / 2);
    const double lat_hi = std::min(p.latitude_center + 0.5 * p.band_extent, kPi / 2);
    const int cols = tessellation;
    const int rows = std::max(1, tessellation / 2);
    for (int j = 0; j <= rows; ++j) {
      const double t = static_cast<double>(j) / rows;
      const double lat = lat_lo + t * (lat_hi - lat_lo);
      for (int i = 0; i <= cols; ++i) {
        const double u = static_cast<double>(i) / cols;
        const double lon = p.longitude_center + (u - 0.5) * 2.0 * kPi;
        const Eigen::Vector3d dir = std::cos(lat) * (std::cos(lon) * front + std::sin(lon) * east) + std::sin(lat) * up;
        mesh.vertices.push_back(sphere.center + radius * dir);
        mesh.uvs.emplace_back(u, t);
      }
    }
    add_grid_triangles(mesh, cols, rows);
  }
  return mesh;
}

Eigen::Vector2d surface_to_content_uv(const ParametricAnchor& anchor, const Eigen::Vector2d& uv) {
  if (const auto* p = std::get_if<PlanarParams>(&anchor.free_params)) {
    const Eigen::Vector2d half(0.5, 0.5);
    return (uv - half - p->uv_center).cwiseQuotient(p->uv_scale) + half;
  }
  return uv;
}

Image compose_layer_texture(const ContentLayer& layer) {
  const Image& src = layer.content;
  if (src.empty()) fail(ErrorCode::InvalidArgument, "layer content is empty");
  const int w = src.width(), h = src.height();
  const int nu = std::max(1, layer.repeat[0]);
  const int nv = std::max(1, layer.repeat[1]);
  const int cell_w = w + static_cast<int>(std::lround(std::max(0.0, layer.gap[0]) * w));
  const int cell_h = h + static_cast<int>(std::lround(std::max(0.0, layer.gap[1]) * h));
  const double c = snap(std::cos(layer.content_rotation));
  const double s = snap(std::sin(layer.content_rotation));

  Image out(nu * cell_w, nv * cell_h, Rgba8{});
  for (int y = 0; y < out.height(); ++y) {
    const double py = (y % cell_h) + 0.5 - 0.5 * cell_h;
    for (int x = 0; x < out.width(); ++x) {
      const int col_cell = x / cell_w;
      const double px = (x % cell_w) + 0.5 - 0.5 * cell_w;
      // Inverse of a counter-clockwise (on screen) rotation in y-down pixels.
      const double sx = c * px - s * py + 0.5 * w;
      const double sy = s * px + c * py + 0.5 * h;
      int col = static_cast<int>(std::floor(sx));
      const int row = static_cast<int>(std::floor(sy));
      if (col < 0 || col >= w || row < 0 || row >= h) continue;
      if (layer.mirror && (col_cell % 2 == 1)) col = w - 1 - col;
      out(x, y) = src(col, row);
    }
  }
  return out;
}

}  // namespace parallax
