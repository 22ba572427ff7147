#include "parallax/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "parallax/error.hpp"

namespace parallax {
namespace {

constexpr double kUvTolerance = 1e-9;

struct ClipVertex {
  Eigen::Vector3d p;
  Eigen::Vector2d uv;
};

// Screen-space vertex in framebuffer sample coordinates.
struct ScreenVertex {
  double x, y;
  double inv_z;
  Eigen::Vector2d uv_over_z;
};

double to_unit(std::uint8_t c) { return c / 255.0; }

std::uint8_t to_byte(double x) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
}

double lerp(double a, double b, double t) { return a + (b - a) * t; }

// Edge function evaluated with the endpoints in a canonical order so the two
// triangles sharing an edge see exactly negated values.
double edge(const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
  const bool swap = (b.x < a.x) || (b.x == a.x && b.y < a.y);
  const ScreenVertex& p = swap ? b : a;
  const ScreenVertex& q = swap ? a : b;
  const double e = (q.x - p.x) * (py - p.y) - (q.y - p.y) * (px - p.x);
  return swap ? -e : e;
}

// Tie-break for samples exactly on an edge; antisymmetric in edge direction.
bool owns_edge(const ScreenVertex& a, const ScreenVertex& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  return dy > 0.0 || (dy == 0.0 && dx < 0.0);
}

// Keeps the part of the triangle with z >= near.
std::vector<ClipVertex> clip_near(const std::array<ClipVertex, 3>& tri, double near) {
  std::vector<ClipVertex> out;
  for (std::size_t i = 0; i < 3; ++i) {
    const ClipVertex& a = tri[i];
    const ClipVertex& b = tri[(i + 1) % 3];
    const bool a_in = a.p.z() >= near, b_in = b.p.z() >= near;
    if (a_in) out.push_back(a);
    if (a_in != b_in) {
      const double t = (near - a.p.z()) / (b.p.z() - a.p.z());
      out.push_back({a.p + t * (b.p - a.p), a.uv + t * (b.uv - a.uv)});
      out.back().p.z() = near;
    }
  }
  return out;
}

void raster_triangle(Framebuffer& fb, std::array<ScreenVertex, 3> v, const Image& texture,
                     const ParametricAnchor& anchor, double eps) {
  double area = edge(v[0], v[1], v[2].x, v[2].y);
  if (area == 0.0 || !std::isfinite(area)) return;
  if (area < 0.0) {
    std::swap(v[1], v[2]);
    area = -area;
  }
  const int w = fb.color.width(), h = fb.color.height();
  const double min_x = std::min({v[0].x, v[1].x, v[2].x});
  const double max_x = std::max({v[0].x, v[1].x, v[2].x});
  const double min_y = std::min({v[0].y, v[1].y, v[2].y});
  const double max_y = std::max({v[0].y, v[1].y, v[2].y});
  const int x0 = std::max(0, static_cast<int>(std::ceil(std::max(min_x, -1.0))));
  const int x1 = std::min(w - 1, static_cast<int>(std::floor(std::min(max_x, static_cast<double>(w)))));
  const int y0 = std::max(0, static_cast<int>(std::ceil(std::max(min_y, -1.0))));
  const int y1 = std::min(h - 1, static_cast<int>(std::floor(std::min(max_y, static_cast<double>(h)))));
  const std::array<bool, 3> owns = {owns_edge(v[1], v[2]), owns_edge(v[2], v[0]), owns_edge(v[0], v[1])};

  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const std::array<double, 3> e = {edge(v[1], v[2], x, y), edge(v[2], v[0], x, y), edge(v[0], v[1], x, y)};
      bool inside = true;
      for (int i = 0; i < 3 && inside; ++i) inside = e[i] > 0.0 || (e[i] == 0.0 && owns[i]);
      if (!inside) continue;

      const double b0 = e[0] / area, b1 = e[1] / area, b2 = e[2] / area;
      const double inv_z = b0 * v[0].inv_z + b1 * v[1].inv_z + b2 * v[2].inv_z;
      if (!(inv_z > 0.0)) continue;
      const double z = 1.0 / inv_z;
      double& zbuf = fb.depth(x, y);
      if (!(z < zbuf * (1.0 + eps))) continue;

      const Eigen::Vector2d uv = (b0 * v[0].uv_over_z + b1 * v[1].uv_over_z + b2 * v[2].uv_over_z) * z;
      const Eigen::Vector4d texel = sample_texture(texture, surface_to_content_uv(anchor, uv));
      if (texel[3] <= 0.0) continue;
      fb.color(x, y) = blend_over(fb.color(x, y), texel);
      if (texel[3] >= 0.5) zbuf = z;
    }
  }
}

}  // namespace

Framebuffer make_framebuffer(const DepthScene& scene, const RenderSettings& settings) {
  const int ss = std::max(1, settings.supersample);
  Framebuffer fb;
  fb.supersample = ss;
  fb.color = Image(scene.width() * ss, scene.height() * ss);
  fb.depth = Raster<double>(scene.width() * ss, scene.height() * ss);
  for (int y = 0; y < fb.color.height(); ++y) {
    for (int x = 0; x < fb.color.width(); ++x) {
      const int px = x / ss, py = y / ss;
      fb.color(x, y) = settings.solid_background ? *settings.solid_background : scene.image(px, py);
      fb.depth(x, y) = scene.valid(px, py) ? static_cast<double>(scene.depth(px, py))
                                           : std::numeric_limits<double>::infinity();
    }
  }
  return fb;
}

void draw_mesh(Framebuffer& fb, const PinholeCamera& camera, const SurfaceMesh& mesh, const Image& texture,
               const ParametricAnchor& anchor, bool double_sided, double depth_epsilon_rel) {
  double max_z = 0.0;
  for (const auto& p : mesh.vertices) max_z = std::max(max_z, p.z());
  if (!(max_z > 0.0)) return;
  const double near = 1e-6 * max_z;
  const double ss = fb.supersample;

  auto to_screen = [&](const ClipVertex& c) {
    const double inv_z = 1.0 / c.p.z();
    const double u = camera.cx + camera.fx * c.p.x() * inv_z;
    const double v = camera.cy + camera.fy * c.p.y() * inv_z;
    return ScreenVertex{(u + 0.5) * ss - 0.5, (v + 0.5) * ss - 0.5, inv_z, c.uv * inv_z};
  };

  for (const auto& t : mesh.triangles) {
    const std::array<ClipVertex, 3> tri = {ClipVertex{mesh.vertices[t[0]], mesh.uvs[t[0]]},
                                           ClipVertex{mesh.vertices[t[1]], mesh.uvs[t[1]]},
                                           ClipVertex{mesh.vertices[t[2]], mesh.uvs[t[2]]}};
    if (!double_sided) {
      const Eigen::Vector3d n = (tri[1].p - tri[0].p).cross(tri[2].p - tri[0].p);
      if (!(n.dot(-tri[0].p) > 0.0)) continue;
    }
    const std::vector<ClipVertex> poly = clip_near(tri, near);
    if (poly.size() < 3) continue;
    const ScreenVertex s0 = to_screen(poly[0]);
    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
      raster_triangle(fb, {s0, to_screen(poly[i]), to_screen(poly[i + 1])}, texture, anchor, depth_epsilon_rel);
  }
}

Image resolve(const Framebuffer& fb) {
  const int ss = fb.supersample;
  if (ss == 1) return fb.color;
  const int w = fb.color.width() / ss, h = fb.color.height() / ss;
  Image out(w, h);
  const double n = ss * ss;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Rgba8 first = fb.color(x * ss, y * ss);
      bool uniform = true;
      double sa = 0.0, sr = 0.0, sg = 0.0, sb = 0.0;
      for (int j = 0; j < ss; ++j) {
        for (int i = 0; i < ss; ++i) {
          const Rgba8 c = fb.color(x * ss + i, y * ss + j);
          uniform = uniform && c == first;
          const double a = to_unit(c.a);
          sa += a;
          sr += to_unit(c.r) * a;
          sg += to_unit(c.g) * a;
          sb += to_unit(c.b) * a;
        }
      }
      if (uniform) {
        out(x, y) = first;
      } else if (sa > 0.0) {
        out(x, y) = {to_byte(sr / sa), to_byte(sg / sa), to_byte(sb / sa), to_byte(sa / n)};
      }
    }
  }
  return out;
}

Eigen::Vector4d sample_texture(const Image& texture, const Eigen::Vector2d& uv) {
  if (texture.empty() || !(uv.x() >= -kUvTolerance && uv.x() <= 1.0 + kUvTolerance &&
                           uv.y() >= -kUvTolerance && uv.y() <= 1.0 + kUvTolerance))
    return Eigen::Vector4d::Zero();
  const int w = texture.width(), h = texture.height();
  const double fx = std::clamp(std::clamp(uv.x(), 0.0, 1.0) * w - 0.5, 0.0, w - 1.0);
  const double fy = std::clamp((1.0 - std::clamp(uv.y(), 0.0, 1.0)) * h - 0.5, 0.0, h - 1.0);
  const int ix = std::min(static_cast<int>(fx), w - 1), iy = std::min(static_cast<int>(fy), h - 1);
  const int jx = std::min(ix + 1, w - 1), jy = std::min(iy + 1, h - 1);
  const double tx = fx - ix, ty = fy - iy;
  const std::array<Rgba8, 4> c = {texture(ix, iy), texture(jx, iy), texture(ix, jy), texture(jx, jy)};

  auto channel = [&](auto get) {
    return lerp(lerp(to_unit(get(c[0])), to_unit(get(c[1])), tx), lerp(to_unit(get(c[2])), to_unit(get(c[3])), tx), ty);
  };
  const double alpha = channel([](const Rgba8& p) { return p.a; });
  if (alpha <= 0.0) return Eigen::Vector4d::Zero();
  const bool same_rgb = std::all_of(c.begin(), c.end(), [&](const Rgba8& p) {
    return p.r == c[0].r && p.g == c[0].g && p.b == c[0].b;
  });
  if (same_rgb) return {to_unit(c[0].r), to_unit(c[0].g), to_unit(c[0].b), alpha};

  // Alpha-weighted color so transparent texels do not bleed their RGB.
  const std::array<double, 4> wts = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
  Eigen::Vector3d rgb = Eigen::Vector3d::Zero();
  double wa = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double a = wts[i] * to_unit(c[i].a);
    rgb += a * Eigen::Vector3d(to_unit(c[i].r), to_unit(c[i].g), to_unit(c[i].b));
    wa += a;
  }
  rgb /= wa;
  return {rgb.x(), rgb.y(), rgb.z(), alpha};
}

Rgba8 blend_over(const Rgba8& dst, const Eigen::Vector4d& src) {
  const double sa = std::clamp(src[3], 0.0, 1.0);
  const double da = to_unit(dst.a);
  const double out_a = sa + da * (1.0 - sa);
  if (out_a <= 0.0) return {};
  auto mix = [&](double s, std::uint8_t d) { return (s * sa + to_unit(d) * da * (1.0 - sa)) / out_a; };
  return {to_byte(mix(src[0], dst.r)), to_byte(mix(src[1], dst.g)), to_byte(mix(src[2], dst.b)), to_byte(out_a)};
}

Image render_document(const SceneDocument& doc, const DepthScene& scene, const RenderSettings& settings) {
  const double eps = std::clamp(settings.depth_epsilon_rel, 0.0, 0.1);
  Framebuffer fb = make_framebuffer(scene, settings);
  for (const ContentLayer& layer : doc.layers) {
    if (!layer.visible) continue;
    const ParametricAnchor* anchor = doc.find_anchor(layer.anchor_id);
    if (!anchor) fail(ErrorCode::NotFound, "layer '" + layer.id + "' references unknown anchor '" + layer.anchor_id + "'");
    const SurfaceMesh mesh = build_surface_mesh(*anchor, settings.tessellation);
    draw_mesh(fb, scene.camera, mesh, compose_layer_texture(layer), *anchor, layer.double_sided, eps);
  }
  if (settings.overlay_anchor) {
    const ParametricAnchor* anchor = doc.find_anchor(*settings.overlay_anchor);
    if (!anchor) fail(ErrorCode::NotFound, "overlay anchor '" + *settings.overlay_anchor + "' not found");
    const SurfaceMesh mesh = build_surface_mesh(*anchor, settings.tessellation);
    draw_mesh(fb, scene.camera, mesh, Image(1, 1, kOverlayTint), *anchor, true, eps);
  }
  return resolve(fb);
}

}  // namespace parallax
