#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "generators.hpp"
#include "oracles.hpp"
#include "parallax/error.hpp"
#include "parallax/geomfit.hpp"

namespace parallax {
namespace {

constexpr double kPi = std::numbers::pi;

using gen::angle_deg;
using gen::cloud_of;
using gen::cylinder_grid;
using gen::median_depth;
using gen::noisy_plane;
using gen::NoisyPlane;

// --- clean_pointcloud ------------------------------------------------------

std::vector<bool> brute_force_keep(const std::vector<Eigen::Vector3d>& pts, int k, double sigma_mult) {
  const std::size_t n = pts.size();
  const std::size_t kk = std::min<std::size_t>(k, n - 1);
  std::vector<double> mean(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) d.push_back((pts[i] - pts[j]).norm());
    std::sort(d.begin(), d.end());
    double s = 0.0;
    for (std::size_t j = 0; j < kk; ++j) s += d[j];
    mean[i] = s / kk;
  }
  double mu = 0.0;
  for (double m : mean) mu += m;
  mu /= n;
  double var = 0.0;
  for (double m : mean) var += (m - mu) * (m - mu);
  const double limit = mu + sigma_mult * std::sqrt(var / n);
  std::vector<bool> keep(n);
  for (std::size_t i = 0; i < n; ++i) keep[i] = mean[i] <= limit;
  return keep;
}

TEST(CleanPointcloud, RemovesFarOutlier) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 100; ++i) pts.emplace_back(u(rng), u(rng), 5.0);
  pts.emplace_back(100.0 * std::sqrt(2.0), 0.0, 5.0);
  const CleanResult r = clean_pointcloud(cloud_of(pts), 8, 2.0);
  EXPECT_EQ(r.cloud.size(), 100u);
  EXPECT_EQ(r.removed, 1u);
  const auto keep = brute_force_keep(pts, 8, 2.0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (keep[i]) {
      EXPECT_EQ(r.cloud.points[j++], pts[i]);
    }
  EXPECT_EQ(j, r.cloud.size());
}

TEST(CleanPointcloud, MatchesBruteForceOnRandomClouds) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Eigen::Vector3d> pts;
    const int n = 30 + trial * 7;
    for (int i = 0; i < n; ++i) pts.emplace_back(g(rng), g(rng), 4.0 + g(rng));
    const int k = 1 + trial % 10;
    const auto keep = brute_force_keep(pts, k, 1.5);
    const CleanResult r = clean_pointcloud(cloud_of(pts), k, 1.5);
    std::vector<Eigen::Vector3d> expected;
    for (int i = 0; i < n; ++i)
      if (keep[i]) expected.push_back(pts[i]);
    EXPECT_EQ(r.cloud.points, expected) << "trial " << trial;
  }
}

TEST(CleanPointcloud, UniformSpacingUnchanged) {
  // Evenly spaced ring: every point has identical neighbor distances.
  std::vector<Eigen::Vector3d> ring;
  for (int i = 0; i < 64; ++i) ring.emplace_back(std::cos(2 * kPi * i / 64), std::sin(2 * kPi * i / 64), 3.0);
  const CleanResult r = clean_pointcloud(cloud_of(ring), 8, 2.0);
  EXPECT_EQ(r.cloud.size(), ring.size());
  EXPECT_EQ(r.removed, 0u);
}

TEST(CleanPointcloud, TwoPointsClampK) {
  const CleanResult r = clean_pointcloud(cloud_of({{0, 0, 1}, {1, 0, 1}}), 8, 2.0);
  EXPECT_EQ(r.cloud.size(), 2u);
  EXPECT_FALSE(r.kept_all_fallback);
}

TEST(CleanPointcloud, KeepsSourcePixelsParallel) {
  PointCloud pc;
  for (int i = 0; i < 20; ++i) {
    pc.points.emplace_back(i * 0.01, 0.0, 1.0);
    pc.source_pixels.push_back({i, 0});
  }
  pc.points.emplace_back(50.0, 0.0, 1.0);
  pc.source_pixels.push_back({99, 0});
  const CleanResult r = clean_pointcloud(pc, 3, 1.0);
  ASSERT_EQ(r.cloud.points.size(), r.cloud.source_pixels.size());
  for (std::size_t i = 0; i < r.cloud.size(); ++i) EXPECT_EQ(r.cloud.source_pixels[i].u, static_cast<int>(std::lround(r.cloud.points[i].x() * 100)));
}

// --- fit_plane_ransac ------------------------------------------------------

TEST(FitPlane, ExactFrontoParallel) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 500; ++i) pts.emplace_back(u(rng), u(rng), 5.0);
  const PlaneFit fit = fit_plane_ransac(cloud_of(pts));
  EXPECT_NEAR((fit.plane.normal - Eigen::Vector3d(0, 0, -1)).norm(), 0.0, 1e-12);
  for (const auto& p : pts) EXPECT_LE(std::abs(fit.plane.signed_distance(p)), 1e-9);
  EXPECT_EQ(fit.inliers.size(), pts.size());
}

TEST(FitPlane, AnalyticTiltedPlane) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 400; ++i) {
    const double x = u(rng), y = u(rng);
    pts.emplace_back(x, y, 3.0 - x - y);
  }
  const PlaneFit fit = fit_plane_ransac(cloud_of(pts));
  const Eigen::Vector3d expected = Eigen::Vector3d(1, 1, 1).normalized();
  EXPECT_LT(std::acos(std::min(1.0, std::abs(fit.plane.normal.dot(expected)))), 1e-6);
  EXPECT_GT(fit.plane.normal.dot(-fit.plane.centroid), 0.0);
}

TEST(FitPlane, HypothesisCountMatchesReplayOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const NoisyPlane np = noisy_plane(100 + seed, 1500);
    const PlaneFit fit = fit_plane_ransac(cloud_of(np.points), 0.01, 200, seed);
    const double tau = 0.01 * median_depth(np.points);
    std::size_t best = 0;
    for (const auto& s : ransac_samples(np.points.size(), 200, seed)) {
      const Eigen::Vector3d n =
          (np.points[s[1]] - np.points[s[0]]).cross(np.points[s[2]] - np.points[s[0]]).normalized();
      const double d = -n.dot(np.points[s[0]]);
      std::size_t count = 0;
      for (const auto& p : np.points) count += std::abs(n.dot(p) + d) <= tau;
      best = std::max(best, count);
    }
    const double rel = std::abs(static_cast<double>(fit.hypothesis_inliers) - static_cast<double>(best)) / best;
    EXPECT_LE(rel, 0.02) << "seed " << seed;
  }
}

TEST(FitPlane, ResidualBoundAndInlierSetAreExact) {
  const NoisyPlane np = noisy_plane(9);
  const PlaneFit fit = fit_plane_ransac(cloud_of(np.points), 0.01, 500, 9);
  EXPECT_DOUBLE_EQ(fit.threshold_abs, 0.01 * median_depth(np.points));
  std::vector<std::size_t> expected;
  for (std::size_t i = 0; i < np.points.size(); ++i)
    if (std::abs(fit.plane.signed_distance(np.points[i])) <= fit.threshold_abs) expected.push_back(i);
  EXPECT_EQ(fit.inliers, expected);
  EXPECT_LT(angle_deg(fit.plane.normal, np.normal), 1.0);
}

TEST(FitPlane, DeterministicForSeed) {
  const NoisyPlane np = noisy_plane(21);
  const PlaneFit a = fit_plane_ransac(cloud_of(np.points), 0.01, 300, 77);
  const PlaneFit b = fit_plane_ransac(cloud_of(np.points), 0.01, 300, 77);
  EXPECT_EQ(a.plane, b.plane);
  EXPECT_EQ(a.inliers, b.inliers);
}

TEST(FitPlane, PlaneInvariantsHold) {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    const PlaneFit fit = fit_plane_ransac(cloud_of(noisy_plane(seed, 800).points), 0.01, 200, seed);
    const Plane& p = fit.plane;
    EXPECT_NEAR(p.normal.norm(), 1.0, 1e-9);
    EXPECT_NEAR(p.primary_dir.dot(p.normal), 0.0, 1e-9);
    EXPECT_NEAR(p.primary_dir.norm(), 1.0, 1e-9);
    EXPECT_GE(p.extent.x(), 0.0);
    EXPECT_GE(p.extent.x(), p.extent.y() * 0.5);
    EXPECT_NEAR(p.signed_distance(p.centroid), 0.0, 1e-9);
    EXPECT_GT(p.normal.dot(-p.centroid), 0.0);
  }
}

TEST(FitPlane, ExtentCoversInliers) {
  const std::vector<Eigen::Vector3d> pts = noisy_plane(44, 600).points;
  const PlaneFit fit = fit_plane_ransac(cloud_of(pts));
  const Eigen::Vector3d s = fit.plane.secondary_dir();
  for (auto i : fit.inliers) {
    const Eigen::Vector3d rel = pts[i] - fit.plane.centroid;
    EXPECT_LE(std::abs(rel.dot(fit.plane.primary_dir)), fit.plane.extent.x() + 1e-12);
    EXPECT_LE(std::abs(rel.dot(s)), fit.plane.extent.y() + 1e-12);
  }
}

TEST(FitPlane, DegenerateInputs) {
  auto code_of = [](const std::vector<Eigen::Vector3d>& pts) {
    try {
      fit_plane_ransac(cloud_of(pts));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of({{0, 0, 1}, {1, 0, 1}}), ErrorCode::DegenerateCloud);
  std::vector<Eigen::Vector3d> line;
  for (int i = 0; i < 20; ++i) line.emplace_back(i, 2 * i, 3.0 + i);
  EXPECT_EQ(code_of(line), ErrorCode::DegenerateCloud);
}

TEST(RansacSamples, DistinctIndicesAndReproducible) {
  const auto a = ransac_samples(10, 100, 5);
  EXPECT_EQ(a, ransac_samples(10, 100, 5));
  EXPECT_NE(a, ransac_samples(10, 100, 6));
  for (const auto& s : a) {
    EXPECT_NE(s[0], s[1]);
    EXPECT_NE(s[0], s[2]);
    EXPECT_NE(s[1], s[2]);
    for (auto i : s) EXPECT_LT(i, 10u);
  }
}

// --- fit_cylinder ------------------------------------------------------------

TEST(FitCylinder, AxisAlignedExactSampling) {
  const Cylinder c = fit_cylinder(cloud_of(cylinder_grid({0, 0, 5}, {0, 0, 1}, 1.0, 2.0)));
  EXPECT_LT(angle_deg(c.axis_dir, {0, 0, 1}), 1e-6 * 180 / kPi);
  EXPECT_NEAR(c.radius, 1.0, 1e-9);
  EXPECT_NEAR(c.half_height, 2.0, 1e-9);
  EXPECT_NEAR((c.axis_point - Eigen::Vector3d(0, 0, 5)).norm(), 0.0, 1e-9);
}

TEST(FitCylinder, ForcedDirectionMatchesDistanceOracle) {
  const std::vector<Eigen::Vector3d> pts = cylinder_grid({0, 0, 5}, {0, 0, 1}, 1.0, 2.0);
  const Cylinder c = fit_cylinder(cloud_of(pts), Eigen::Vector3d(1, 0, 0));
  EXPECT_EQ(c.axis_dir, Eigen::Vector3d(1, 0, 0));
  double max_r = 0.0;
  for (const auto& p : pts) {
    const Eigen::Vector3d rel = p - c.axis_point;
    max_r = std::max(max_r, (rel - rel.dot(c.axis_dir) * c.axis_dir).norm());
  }
  EXPECT_NEAR(c.radius, max_r, 1e-12);
  // Footprint on the yz plane is the rectangle [-1,1] x [3,7]; its enclosing
  // circle has the half-diagonal as radius.
  EXPECT_NEAR(c.radius, std::sqrt(1.0 + 4.0), 1e-9);
}

TEST(FitCylinder, CollinearPointsGiveZeroRadius) {
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 10; ++i) pts.emplace_back(1.0 + i, 2.0 + 2 * i, 3.0);
  const Cylinder c = fit_cylinder(cloud_of(pts));
  EXPECT_LT(angle_deg(c.axis_dir, {1, 2, 0}), 1e-6);
  EXPECT_NEAR(c.radius, 0.0, 1e-9);
}

TEST(FitCylinder, DegenerateSinglePoint) {
  EXPECT_THROW(fit_cylinder(cloud_of({{1, 1, 1}})), Error);
  const Cylinder c = fit_cylinder(cloud_of({{1, 1, 1}}), Eigen::Vector3d(0, 1, 0));
  EXPECT_EQ(c.radius, 0.0);
}

TEST(FitCylinder, RandomPosesRecoverAxisAndRadius) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0), r(0.3, 2.0), m(2.0, 4.0);
  for (int pose = 0; pose < 50; ++pose) {
    Eigen::Vector3d axis(u(rng), u(rng), u(rng));
    axis.normalize();
    const double radius = r(rng);
    const Eigen::Vector3d center(u(rng), u(rng), 8.0 + u(rng));
    const Cylinder c = fit_cylinder(cloud_of(cylinder_grid(center, axis, radius, m(rng) * radius)));
    EXPECT_LT(angle_deg(c.axis_dir, axis), 2.0) << pose;
    EXPECT_LT(std::abs(c.radius - radius) / radius, 1e-6) << pose;
  }
}

TEST(FitCylinder, ContainsEveryPoint) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 200; ++i) pts.emplace_back(3 * g(rng), g(rng), 6 + 0.5 * g(rng));
    const Cylinder c = fit_cylinder(cloud_of(pts));
    EXPECT_NEAR(c.axis_dir.norm(), 1.0, 1e-9);
    for (const auto& p : pts) {
      const Eigen::Vector3d rel = p - c.axis_point;
      EXPECT_LE((rel - rel.dot(c.axis_dir) * c.axis_dir).norm(), c.radius * (1 + 1e-6));
      EXPECT_LE(std::abs(rel.dot(c.axis_dir)), c.half_height * (1 + 1e-9) + 1e-12);
    }
  }
}

// --- fit_sphere ----------------------------------------------------------------

TEST(FitSphere, SinglePointAndPair) {
  const Sphere one = fit_sphere(cloud_of({{1, 2, 3}}));
  EXPECT_EQ(one.center, Eigen::Vector3d(1, 2, 3));
  EXPECT_EQ(one.radius, 0.0);
  const Sphere two = fit_sphere(cloud_of({{0, 0, 1}, {2, 0, 1}}));
  EXPECT_NEAR((two.center - Eigen::Vector3d(1, 0, 1)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(two.radius, 1.0, 1e-15);
}

TEST(FitSphere, MatchesBruteForceOnSmallClouds) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 12;
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng), 5 + u(rng));
    const Sphere got = fit_sphere(cloud_of(pts), 42);
    const Sphere want = oracle::min_sphere_brute_force(pts);
    EXPECT_NEAR(got.radius, want.radius, 1e-9) << trial;
    EXPECT_LT((got.center - want.center).norm(), 1e-9) << trial;
  }
}

TEST(FitSphere, ContainsEveryPointAndIsDeterministic) {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 5000; ++i) pts.emplace_back(g(rng), 2 * g(rng), 9 + g(rng));
  const Sphere s = fit_sphere(cloud_of(pts), 3);
  for (const auto& p : pts) EXPECT_LE((p - s.center).norm(), s.radius * (1 + 1e-9));
  const Sphere again = fit_sphere(cloud_of(pts), 3);
  EXPECT_EQ(s, again);
}

TEST(FitSphere, LargeCloudsStillContainEveryPoint) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::Vector3d> pts;
  for (std::size_t i = 0; i < kSphereSampleLimit + 20'000; ++i) pts.emplace_back(u(rng), u(rng), 4 + u(rng));
  const Sphere s = fit_sphere(cloud_of(pts), 1);
  for (const auto& p : pts) ASSERT_LE((p - s.center).norm(), s.radius * (1 + 1e-9));
}

TEST(MinimalEnclosingCircle, MatchesThreePointOracle) {
  const std::vector<Eigen::Vector2d> pts = {{0, 0}, {4, 0}, {0, 3}, {1, 1}};
  const Circle2 c = minimal_enclosing_circle(pts);
  EXPECT_NEAR(c.radius, 2.5, 1e-12);
  EXPECT_NEAR((c.center - Eigen::Vector2d(2, 1.5)).norm(), 0.0, 1e-12);
}

// --- derived planes ------------------------------------------------------------

TEST(ExtrudedPlane, GroundPlane) {
  Plane ground;
  ground.normal = {0, -1, 0};
  ground.primary_dir = {1, 0, 0};
  ground.centroid = {0, 1.5, 6};
  ground.d = -ground.normal.dot(ground.centroid);
  const Plane ex = derive_extruded_plane(ground);
  EXPECT_NEAR(std::abs(ex.normal.z()), 1.0, 1e-12);
  EXPECT_GT(ex.normal.dot(-ex.centroid), 0.0);
  EXPECT_EQ(ex.primary_dir, ground.primary_dir);
  EXPECT_NEAR(ex.signed_distance(ground.centroid), 0.0, 1e-12);
  EXPECT_NEAR(ex.normal.dot(ground.normal), 0.0, 1e-12);
  const Plane twice = derive_extruded_plane(ex);
  EXPECT_NEAR(std::abs(twice.normal.dot(ground.normal)), 1.0, 1e-12);
}

TEST(ExtrudedPlane, CourtFloorIsVerticalAlongDominantDirection) {
  // Floor strip elongated along (1, 0, 1): the extrusion stands on that line.
  // A symmetric grid makes the centroid and principal direction exact.
  const Eigen::Vector3d dir = Eigen::Vector3d(1, 0, 1).normalized();
  const Eigen::Vector3d side = Eigen::Vector3d(1, 0, -1).normalized();
  std::vector<Eigen::Vector3d> pts;
  for (int i = -40; i <= 40; ++i)
    for (int j = -5; j <= 5; ++j) pts.push_back(Eigen::Vector3d(0, 1.6, 8) + 0.1 * i * dir + 0.1 * j * side);
  const PlaneFit fit = fit_plane_ransac(cloud_of(pts));
  const Plane ex = derive_extruded_plane(fit.plane);
  EXPECT_NEAR(ex.normal.y(), 0.0, 1e-9);  // vertical plane
  // Inliers projected on the extruded plane's normal spread only across the strip.
  double spread = 0.0;
  for (const auto& p : pts) spread = std::max(spread, std::abs(ex.signed_distance(p)));
  EXPECT_LE(spread, 0.5 + 1e-9);
  EXPECT_LT(angle_deg(ex.primary_dir, dir), 1e-6);
}

// --- body frames ---------------------------------------------------------------

std::vector<Landmark3D> upright_skeleton(double yaw = 0.0) {
  const Eigen::Vector3d center(0.0, 1.3, 3.0);
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()).toRotationMatrix();
  auto at = [&](double x, double y, double z) {
    return Eigen::Vector3d(center + rot * (Eigen::Vector3d(x, y, z) - center));
  };
  // Shoulders at y = 1.6, hips at y = 1.0; subject's left is -x as seen by the camera.
  return {{"left_shoulder", at(-0.2, 1.6, 3.0)}, {"right_shoulder", at(0.2, 1.6, 3.0)},
          {"left_hip", at(-0.12, 1.0, 3.0)},     {"right_hip", at(0.12, 1.0, 3.0)},
          {"nose", at(0.0, 1.85, 2.9)}};
}

void expect_orthonormal(const BodyFrame& f) {
  for (const Eigen::Vector3d* v : {&f.cranial, &f.anterior, &f.lateral}) EXPECT_NEAR(v->norm(), 1.0, 1e-9);
  EXPECT_NEAR(f.cranial.dot(f.anterior), 0.0, 1e-6);
  EXPECT_NEAR(f.cranial.dot(f.lateral), 0.0, 1e-6);
  EXPECT_NEAR(f.anterior.dot(f.lateral), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(f.frontal.normal.dot(f.anterior)), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(f.median.normal.dot(f.lateral)), 1.0, 1e-9);
}

TEST(BodyFrames, UprightFrontFacingSkeleton) {
  const auto lms = upright_skeleton();
  const BodyFrame f = derive_body_frames(lms, BodyKind::Skeleton);
  EXPECT_NEAR((f.cranial - Eigen::Vector3d(0, 1, 0)).norm(), 0.0, 1e-6);
  EXPECT_NEAR((f.anterior - Eigen::Vector3d(0, 0, -1)).norm(), 0.0, 1e-9);
  EXPECT_GT(f.anterior.dot(-f.frontal.centroid), 0.0);
  expect_orthonormal(f);
}

TEST(BodyFrames, RotationAboutCranialRotatesPlanes) {
  const BodyFrame base = derive_body_frames(upright_skeleton(), BodyKind::Skeleton);
  const double yaw = 30.0 * kPi / 180.0;
  const BodyFrame turned = derive_body_frames(upright_skeleton(yaw), BodyKind::Skeleton);
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()).toRotationMatrix();
  EXPECT_NEAR((turned.frontal.normal - rot * base.frontal.normal).norm(), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(turned.median.normal.dot(rot * base.median.normal)), 1.0, 1e-9);
  EXPECT_NEAR((turned.cranial - base.cranial).norm(), 0.0, 1e-9);
  expect_orthonormal(turned);
}

TEST(BodyFrames, MissingHipIsReported) {
  auto lms = upright_skeleton();
  lms.erase(lms.begin() + 2);
  try {
    derive_body_frames(lms, BodyKind::Skeleton);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingLandmarks);
    EXPECT_NE(std::string(e.what()).find("left_hip"), std::string::npos);
  }
}

TEST(BodyFrames, FaceFrame) {
  const std::vector<Landmark3D> face = {{"left_eye", {-0.03, -0.05, 2.0}},
                                        {"right_eye", {0.03, -0.05, 2.0}},
                                        {"nose_tip", {0.0, -0.01, 1.97}},
                                        {"chin", {0.0, 0.06, 1.99}}};
  const BodyFrame f = derive_body_frames(face, BodyKind::Face);
  expect_orthonormal(f);
  EXPECT_LT(f.cranial.y(), 0.0);  // toward image-up
  EXPECT_LT(f.anterior.z(), 0.0);
  EXPECT_NEAR((f.lateral - Eigen::Vector3d(-1, 0, 0)).norm(), 0.0, 1e-12);
  auto no_nose = face;
  no_nose.erase(no_nose.begin() + 2);
  EXPECT_THROW(derive_body_frames(no_nose, BodyKind::Face), Error);
}

TEST(BodyFrames, RandomSkeletonsAreOrthonormal) {
  std::mt19937_64 rng(18);
  std::normal_distribution<double> g(0.0, 0.05);
  for (int trial = 0; trial < 100; ++trial) {
    auto lms = upright_skeleton(g(rng) * 10);
    for (auto& lm : lms) lm.position += Eigen::Vector3d(g(rng), g(rng), g(rng));
    expect_orthonormal(derive_body_frames(lms, BodyKind::Skeleton));
  }
}

TEST(PrincipalAxes, CanonicalSigns) {
  EXPECT_EQ(canonical_sign({0.1, -0.9, 0.2}), Eigen::Vector3d(-0.1, 0.9, -0.2));
  std::vector<Eigen::Vector3d> pts;
  for (int i = -5; i <= 5; ++i) pts.emplace_back(-2.0 * i, 0.1 * (i % 2), 0.0);
  const PrincipalAxes pa = principal_axes(pts);
  EXPECT_GT(pa.axes(0, 0), 0.0);
  EXPECT_GE(pa.variances[0], pa.variances[1]);
  EXPECT_GE(pa.variances[1], pa.variances[2]);
}

}  // namespace
}  // namespace parallax
