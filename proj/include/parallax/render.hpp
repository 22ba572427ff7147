#pragma once

#include <limits>
#include <optional>
#include <variant>

#include "parallax/anchors.hpp"
#include "parallax/camera.hpp"
#include "parallax/document.hpp"
#include "parallax/image_io.hpp"
#include "parallax/scene.hpp"

namespace parallax {

struct RenderSettings {
  /// A fragment at depth z passes when z < zbuf * (1 + depth_epsilon_rel).
  double depth_epsilon_rel = 1e-3;
  int supersample = 1;
  /// Background color instead of the input photo; occlusion is unchanged.
  std::optional<Rgba8> solid_background;
  int tessellation = 32;
  /// Anchor drawn last as a translucent tint (hover highlight); depth-tested,
  /// never writes depth.
  std::optional<std::string> overlay_anchor;
};

inline constexpr Rgba8 kOverlayTint{64, 128, 255, 102};

/// Color and depth buffers at the scene resolution times the supersample
/// factor. Invalid scene depth initializes to +infinity.
struct Framebuffer {
  Image color;
  Raster<double> depth;
  int supersample = 1;
};

Framebuffer make_framebuffer(const DepthScene& scene, const RenderSettings& settings);

/// Rasterizes one mesh into the framebuffer: half-space coverage with a
/// top-left rule, perspective-correct UVs, depth test against the buffer,
/// straight-alpha source-over blending, depth write for alpha >= 0.5.
void draw_mesh(Framebuffer& fb, const PinholeCamera& camera, const SurfaceMesh& mesh,
               const Image& texture, const ParametricAnchor& anchor, bool double_sided,
               double depth_epsilon_rel);

/// Box-filters the supersampled color buffer down to scene resolution.
Image resolve(const Framebuffer& fb);

/// Composites every visible layer, in document order, over the scene photo.
Image render_document(const SceneDocument& doc, const DepthScene& scene,
                      const RenderSettings& settings = {});

/// Bilinear texel fetch with clamp inside [0,1]^2 and transparent outside.
/// Colors are straight alpha in [0,1].
Eigen::Vector4d sample_texture(const Image& texture, const Eigen::Vector2d& uv);

/// Straight-alpha source-over of `src` onto an 8-bit pixel.
Rgba8 blend_over(const Rgba8& dst, const Eigen::Vector4d& src);

inline Bytes export_png(const Image& raster) { return encode_png(raster); }

}  // namespace parallax
