#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "parallax/anchors.hpp"
#include "parallax/error.hpp"

namespace parallax {
namespace {

constexpr double kPi = std::numbers::pi;

using gen::distance_to_axis;
using gen::test_cylinder;
using gen::test_plane;
using gen::test_sphere;

TEST(ConstrainedEdit, PlanarOffsetTranslatesAlongNormal) {
  const ParametricAnchor a = make_planar_anchor("a", test_plane());
  const ParametricAnchor b = apply_constrained_edit(a, "offset", 0.37);
  const SurfaceMesh ma = build_surface_mesh(a, 4), mb = build_surface_mesh(b, 4);
  const Eigen::Vector3d n = std::get<Plane>(a.geometry).normal;
  ASSERT_EQ(ma.vertices.size(), mb.vertices.size());
  for (std::size_t i = 0; i < ma.vertices.size(); ++i)
    EXPECT_NEAR((mb.vertices[i] - ma.vertices[i] - 0.37 * n).norm(), 0.0, 1e-12);
  EXPECT_EQ(a.geometry, b.geometry);
}

TEST(ConstrainedEdit, CylinderRadiusScaleDoublesDistance) {
  const ParametricAnchor a = make_cylindrical_anchor("c", test_cylinder());
  const ParametricAnchor b = apply_constrained_edit(a, "radius_scale", 1.0);
  EXPECT_EQ(std::get<CylindricalParams>(b.free_params).radius_scale, 2.0);
  const Cylinder& cyl = std::get<Cylinder>(a.geometry);
  const SurfaceMesh ma = build_surface_mesh(a, 16), mb = build_surface_mesh(b, 16);
  for (std::size_t i = 0; i < ma.vertices.size(); ++i)
    EXPECT_NEAR(distance_to_axis(cyl, mb.vertices[i]), 2.0 * distance_to_axis(cyl, ma.vertices[i]), 1e-12);
  EXPECT_EQ(a.geometry, b.geometry);
}

TEST(ConstrainedEdit, ClampsInsteadOfFailing) {
  const ParametricAnchor a = make_planar_anchor("a", test_plane());
  const ParametricAnchor b = apply_constrained_edit(a, "uv_scale_u", -1.5);
  EXPECT_EQ(std::get<PlanarParams>(b.free_params).uv_scale.x(), kMinScale);
  const ParametricAnchor c = apply_constrained_edit(make_cylindrical_anchor("c", test_cylinder()), "arc_span", 100.0);
  EXPECT_EQ(std::get<CylindricalParams>(c.free_params).arc_span, 2.0 * kPi);
  const ParametricAnchor s = apply_constrained_edit(make_spherical_anchor("s", test_sphere()), "latitude_center", 9.0);
  EXPECT_EQ(std::get<SphericalParams>(s.free_params).latitude_center, kPi / 2);
}

TEST(ConstrainedEdit, OnlyNamedParameterChanges) {
  const ParametricAnchor a = make_planar_anchor("a", test_plane());
  const ParametricAnchor b = apply_constrained_edit(a, "size_h", 0.25);
  PlanarParams expected = std::get<PlanarParams>(a.free_params);
  expected.size.y() += 0.25;
  EXPECT_EQ(std::get<PlanarParams>(b.free_params), expected);
  EXPECT_EQ(b.id, a.id);
  EXPECT_EQ(b.kind, a.kind);
}

TEST(ConstrainedEdit, UnknownParam) {
  const ParametricAnchor a = make_spherical_anchor("s", test_sphere());
  try {
    apply_constrained_edit(a, "offset", 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownParam);
  }
  EXPECT_THROW(apply_constrained_edit(a, "radius_scale", std::nan("")), Error);
}

TEST(Placeholder, HugsTheFittedPrimitive) {
  const ParametricAnchor p = make_planar_anchor("p", test_plane());
  const auto& pp = std::get<PlanarParams>(p.free_params);
  EXPECT_EQ(pp.offset, 0.0);
  EXPECT_EQ(pp.uv_scale, Eigen::Vector2d(1, 1));
  EXPECT_EQ(pp.size, test_plane().extent);
  const ParametricAnchor c = make_cylindrical_anchor("c", test_cylinder());
  const auto& cp = std::get<CylindricalParams>(c.free_params);
  EXPECT_EQ(cp.band_height, 2.0 * test_cylinder().half_height);
  EXPECT_EQ(cp.arc_span, 2.0 * kPi);
  EXPECT_EQ(cp.radius_scale, 1.0);
  EXPECT_TRUE(default_double_sided(AnchorKind::Planar));
  EXPECT_FALSE(default_double_sided(AnchorKind::Cylindrical));
  EXPECT_FALSE(default_double_sided(AnchorKind::Spherical));
}

TEST(SurfaceMesh, UnitPlanarQuad) {
  Plane plane = test_plane();
  ParametricAnchor a = make_planar_anchor("a", plane);
  std::get<PlanarParams>(a.free_params).size = {1.0, 1.0};
  const SurfaceMesh m = build_surface_mesh(a, 1);
  ASSERT_EQ(m.vertices.size(), 4u);
  ASSERT_EQ(m.triangles.size(), 2u);
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& v : m.vertices) {
    EXPECT_NEAR(plane.signed_distance(v), 0.0, 1e-9);
    mean += v / 4.0;
  }
  EXPECT_NEAR((mean - plane.centroid).norm(), 0.0, 1e-12);
  EXPECT_NEAR((m.vertices[1] - m.vertices[0]).norm(), 2.0, 1e-12);
  EXPECT_NEAR((m.vertices[2] - m.vertices[0]).norm(), 2.0, 1e-12);
}

TEST(SurfaceMesh, FullCylinderVerticesOnScaledSurface) {
  ParametricAnchor a = make_cylindrical_anchor("c", test_cylinder());
  a = apply_constrained_edit(a, "radius_scale", 0.5);
  const SurfaceMesh m = build_surface_mesh(a, 64);
  const Cylinder& c = std::get<Cylinder>(a.geometry);
  for (const auto& v : m.vertices) EXPECT_NEAR(distance_to_axis(c, v), 1.5 * c.radius, 1e-9 * c.radius);
}

TEST(SurfaceMesh, SphericalBandMatchesParametrization) {
  ParametricAnchor a = make_spherical_anchor("s", test_sphere());
  auto& p = std::get<SphericalParams>(a.free_params);
  p.band_extent = kPi / 3;  // latitudes -30..+30 degrees
  p.longitude_center = 0.4;
  const int tess = 12;
  const SurfaceMesh m = build_surface_mesh(a, tess);
  const Sphere s = test_sphere();
  const Eigen::Vector3d up(0, -1, 0);
  const Eigen::Vector3d front = Eigen::Vector3d(-s.center.x(), 0.0, -s.center.z()).normalized();
  const Eigen::Vector3d east = up.cross(front);
  const int rows = tess / 2, cols = tess;
  ASSERT_EQ(m.vertices.size(), static_cast<std::size_t>((rows + 1) * (cols + 1)));
  for (int j = 0; j <= rows; ++j) {
    for (int i = 0; i <= cols; ++i) {
      const double lat = -kPi / 6 + (kPi / 3) * j / rows;
      const double lon = 0.4 + (static_cast<double>(i) / cols - 0.5) * 2 * kPi;
      const Eigen::Vector3d want =
          s.center + s.radius * (std::cos(lat) * std::cos(lon) * front + std::cos(lat) * std::sin(lon) * east +
                                 std::sin(lat) * up);
      EXPECT_NEAR((m.vertices[j * (cols + 1) + i] - want).norm(), 0.0, 1e-12);
    }
  }
}

void expect_uv_coverage(const SurfaceMesh& m) {
  double lo_u = 1e9, hi_u = -1e9, lo_v = 1e9, hi_v = -1e9;
  for (const auto& uv : m.uvs) {
    lo_u = std::min(lo_u, uv.x());
    hi_u = std::max(hi_u, uv.x());
    lo_v = std::min(lo_v, uv.y());
    hi_v = std::max(hi_v, uv.y());
  }
  EXPECT_EQ(lo_u, 0.0);
  EXPECT_EQ(hi_u, 1.0);
  EXPECT_EQ(lo_v, 0.0);
  EXPECT_EQ(hi_v, 1.0);
  for (const auto& t : m.triangles)
    for (int k : t) {
      EXPECT_GE(k, 0);
      EXPECT_LT(static_cast<std::size_t>(k), m.vertices.size());
    }
}

TEST(SurfaceMesh, UvCoverageAndIndexRange) {
  for (int tess : {1, 2, 7, 32}) {
    expect_uv_coverage(build_surface_mesh(make_planar_anchor("p", test_plane()), tess));
    expect_uv_coverage(build_surface_mesh(make_cylindrical_anchor("c", test_cylinder()), tess));
    expect_uv_coverage(build_surface_mesh(make_spherical_anchor("s", test_sphere()), tess));
  }
  EXPECT_THROW(build_surface_mesh(make_planar_anchor("p", test_plane()), 0), Error);
}

TEST(SurfaceMesh, WindingFacesOutwardOrAlongNormal) {
  const Plane plane = test_plane();
  const SurfaceMesh pm = build_surface_mesh(make_planar_anchor("p", plane), 3);
  for (const auto& t : pm.triangles) {
    const Eigen::Vector3d n = (pm.vertices[t[1]] - pm.vertices[t[0]]).cross(pm.vertices[t[2]] - pm.vertices[t[0]]);
    EXPECT_GT(n.normalized().dot(plane.normal), 1.0 - 1e-9);
  }
  const Cylinder cyl = test_cylinder();
  const SurfaceMesh cm = build_surface_mesh(make_cylindrical_anchor("c", cyl), 16);
  for (const auto& t : cm.triangles) {
    const Eigen::Vector3d& a = cm.vertices[t[0]];
    const Eigen::Vector3d n = (cm.vertices[t[1]] - a).cross(cm.vertices[t[2]] - a);
    const Eigen::Vector3d rel = a - cyl.axis_point;
    EXPECT_GT(n.dot(rel - rel.dot(cyl.axis_dir) * cyl.axis_dir), 0.0);
  }
  const Sphere sph = test_sphere();
  const SurfaceMesh sm = build_surface_mesh(make_spherical_anchor("s", sph), 16);
  for (const auto& t : sm.triangles) {
    const Eigen::Vector3d& a = sm.vertices[t[0]];
    const Eigen::Vector3d n = (sm.vertices[t[1]] - a).cross(sm.vertices[t[2]] - a);
    if (n.norm() < 1e-12) continue;  // collapsed at a pole
    EXPECT_GT(n.dot(a - sph.center), 0.0);
  }
}

TEST(SurfaceMesh, PlanarContentReadsUpright) {
  // At rotation 0 the content's t axis moves up the image and s moves right
  // whenever the plane is seen from its normal side.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Vector3d n(u(rng), u(rng), -1.5 + 0.5 * u(rng));
    const Eigen::Vector3d c(u(rng), 0.5 * u(rng), 5.0 + u(rng));
    Plane plane = test_plane(n, c);
    if (plane.normal.dot(-c) <= 0.0) continue;
    const SurfaceMesh m = build_surface_mesh(make_planar_anchor("p", plane), 1);
    // Vertex order: (0,0) (1,0) (0,1) (1,1) in (s,t).
    auto v_of = [](const Eigen::Vector3d& p) { return p.y() / p.z(); };
    const Eigen::Vector3d mid_bottom = 0.5 * (m.vertices[0] + m.vertices[1]);
    const Eigen::Vector3d mid_top = 0.5 * (m.vertices[2] + m.vertices[3]);
    EXPECT_LT(v_of(mid_top), v_of(mid_bottom)) << trial;
  }
}

// --- property suite: edits never move the fitted primitive -----------------

TEST(ConstraintProperty, PlanarNormalPreserved) {
  const auto violation = gen::random_edit_sequences(make_planar_anchor("p", test_plane()), 1);
  EXPECT_FALSE(violation) << *violation;
}

TEST(ConstraintProperty, CylindricalAxisPreserved) {
  const auto violation = gen::random_edit_sequences(make_cylindrical_anchor("c", test_cylinder()), 2);
  EXPECT_FALSE(violation) << *violation;
}

TEST(ConstraintProperty, SphericalCenterPreserved) {
  const auto violation = gen::random_edit_sequences(make_spherical_anchor("s", test_sphere()), 3);
  EXPECT_FALSE(violation) << *violation;
}

// --- content placement -----------------------------------------------------

TEST(SurfaceToContentUv, PlanarPlacement) {
  ParametricAnchor a = make_planar_anchor("p", test_plane());
  EXPECT_EQ(surface_to_content_uv(a, {0.25, 0.75}), Eigen::Vector2d(0.25, 0.75));
  auto& p = std::get<PlanarParams>(a.free_params);
  p.uv_center = {0.1, -0.2};
  p.uv_scale = {0.5, 2.0};
  // Content center sits at surface (0.6, 0.3); half the width, twice the height.
  EXPECT_NEAR((surface_to_content_uv(a, {0.6, 0.3}) - Eigen::Vector2d(0.5, 0.5)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((surface_to_content_uv(a, {0.85, 0.3}) - Eigen::Vector2d(1.0, 0.5)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((surface_to_content_uv(a, {0.6, 1.3}) - Eigen::Vector2d(0.5, 1.0)).norm(), 0.0, 1e-15);
  const ParametricAnchor c = make_cylindrical_anchor("c", test_cylinder());
  EXPECT_EQ(surface_to_content_uv(c, {0.3, 0.9}), Eigen::Vector2d(0.3, 0.9));
}

Image pattern(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Image img(w, h);
  for (auto& p : img.pixels())
    p = {static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
         static_cast<std::uint8_t>(rng())};
  return img;
}

ContentLayer layer_with(Image content) {
  ContentLayer layer;
  layer.id = "l";
  layer.anchor_id = "a";
  layer.content = std::move(content);
  return layer;
}

TEST(ComposeLayerTexture, IdentityByDefault) {
  const ContentLayer layer = layer_with(pattern(10, 7, 1));
  EXPECT_EQ(compose_layer_texture(layer), layer.content);
}

TEST(ComposeLayerTexture, TwoByOneTiling) {
  ContentLayer layer = layer_with(pattern(10, 10, 2));
  layer.repeat = {2, 1};
  const Image out = compose_layer_texture(layer);
  ASSERT_EQ(out.width(), 20);
  ASSERT_EQ(out.height(), 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) {
      EXPECT_EQ(out(x, y), layer.content(x, y));
      EXPECT_EQ(out(x + 10, y), layer.content(x, y));
    }
}

TEST(ComposeLayerTexture, GapRotationMatchesPerPixelOracle) {
  ContentLayer layer = layer_with(pattern(10, 10, 3));
  layer.repeat = {3, 2};
  layer.gap = {0.1, 0.1};
  layer.content_rotation = kPi / 2;
  EXPECT_EQ(compose_layer_texture(layer), oracle::tile_layer(layer));
}

TEST(ComposeLayerTexture, RandomSettingsMatchOracle) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> dim(1, 13), rep(1, 4);
  std::uniform_real_distribution<double> gap(0.0, 0.6), rot(-kPi, kPi);
  for (int trial = 0; trial < 60; ++trial) {
    ContentLayer layer = layer_with(pattern(dim(rng), dim(rng), trial));
    layer.repeat = {rep(rng), rep(rng)};
    layer.gap = {gap(rng), gap(rng)};
    layer.mirror = trial % 2 == 0;
    layer.content_rotation = trial % 3 == 0 ? 0.0 : rot(rng);
    EXPECT_EQ(compose_layer_texture(layer), oracle::tile_layer(layer)) << trial;
  }
}

TEST(ComposeLayerTexture, MirrorFlipsOddColumnsAndIsAnInvolution) {
  ContentLayer layer = layer_with(pattern(5, 3, 5));
  layer.repeat = {2, 1};
  layer.mirror = true;
  const Image out = compose_layer_texture(layer);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 5; ++x) EXPECT_EQ(out(5 + x, y), layer.content(4 - x, y));
  layer.mirror = false;
  ContentLayer toggled = layer;
  toggled.mirror = !toggled.mirror;
  toggled.mirror = !toggled.mirror;
  EXPECT_EQ(toggled, layer);
}

TEST(ComposeLayerTexture, EmptyContentRejected) {
  EXPECT_THROW(compose_layer_texture(layer_with(Image())), Error);
}

}  // namespace
}  // namespace parallax
