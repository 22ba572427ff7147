#include <algorithm>
#include <map>
#include <optional>
#include <string>

#include <Eigen/Geometry>

#include "parallax/error.hpp"
#include "parallax/geomfit.hpp"

namespace parallax {
namespace {

using Lookup = std::map<std::string, Eigen::Vector3d, std::less<>>;

std::optional<Eigen::Vector3d> find(const Lookup& lookup, std::string_view name) {
  auto it = lookup.find(name);
  if (it == lookup.end()) return std::nullopt;
  return it->second;
}

void require(const Lookup& lookup, std::initializer_list<std::string_view> names, BodyKind kind) {
  std::string missing;
  for (auto name : names) {
    if (lookup.count(name)) continue;
    if (!missing.empty()) missing += ", ";
    missing += name;
  }
  if (!missing.empty())
    fail(ErrorCode::MissingLandmarks, std::string(kind == BodyKind::Skeleton ? "skeleton" : "face") +
                                          " landmarks missing: " + missing);
}

Eigen::Vector3d toward_camera(const Eigen::Vector3d& dir, const Eigen::Vector3d& at) {
  return dir.dot(-at) < 0.0 ? Eigen::Vector3d(-dir) : dir;
}

// Plane through `origin` with the given normal, reading direction chosen so
// that normal x primary = cranial. Extents cover the landmarks, floored.
Plane body_plane(const Eigen::Vector3d& origin, const Eigen::Vector3d& normal,
                 const Eigen::Vector3d& cranial, std::span<const Landmark3D> landmarks, double floor) {
  Plane plane;
  plane.normal = normal;
  plane.centroid = origin;
  plane.d = -normal.dot(origin);
  plane.primary_dir = cranial.cross(normal).normalized();
  const Eigen::Vector3d secondary = plane.secondary_dir();
  for (const auto& lm : landmarks) {
    const Eigen::Vector3d rel = lm.position - origin;
    plane.extent.x() = std::max(plane.extent.x(), std::abs(rel.dot(plane.primary_dir)));
    plane.extent.y() = std::max(plane.extent.y(), std::abs(rel.dot(secondary)));
  }
  plane.extent = plane.extent.cwiseMax(Eigen::Vector2d::Constant(floor));
  return plane;
}

}  // namespace

BodyFrame derive_body_frames(std::span<const Landmark3D> landmarks, BodyKind kind) {
  Lookup lookup;
  for (const auto& lm : landmarks) lookup.emplace(lm.name, lm.position);

  BodyFrame frame;
  frame.kind = kind;
  frame.landmarks.assign(landmarks.begin(), landmarks.end());

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& lm : landmarks) centroid += lm.position;
  if (!landmarks.empty()) centroid /= static_cast<double>(landmarks.size());

  Eigen::Vector3d midline;
  double floor = 0.0;
  if (kind == BodyKind::Skeleton) {
    require(lookup, {"left_shoulder", "right_shoulder", "left_hip", "right_hip"}, kind);
    const Eigen::Vector3d ls = *find(lookup, "left_shoulder"), rs = *find(lookup, "right_shoulder");
    const Eigen::Vector3d lh = *find(lookup, "left_hip"), rh = *find(lookup, "right_hip");
    const Eigen::Vector3d mid_shoulder = 0.5 * (ls + rs);
    const Eigen::Vector3d mid_hip = 0.5 * (lh + rh);
    const Eigen::Vector3d up = mid_shoulder - mid_hip;
    if (!(up.norm() > 0.0)) fail(ErrorCode::DegenerateCloud, "shoulders and hips coincide");
    frame.cranial = up.normalized();
    const Eigen::Vector3d across = ls - rs;
    const Eigen::Vector3d lateral = across - across.dot(frame.cranial) * frame.cranial;
    if (!(lateral.norm() > 1e-12 * across.norm())) fail(ErrorCode::DegenerateCloud, "shoulder line is parallel to the spine");
    frame.lateral = lateral.normalized();
    midline = 0.5 * (mid_shoulder + mid_hip);
    floor = 0.5 * up.norm();  // half torso length
  } else {
    require(lookup, {"left_eye", "right_eye", "nose_tip"}, kind);
    const Eigen::Vector3d le = *find(lookup, "left_eye"), re = *find(lookup, "right_eye");
    const Eigen::Vector3d eye_mid = 0.5 * (le + re);
    const Eigen::Vector3d across = le - re;
    if (!(across.norm() > 0.0)) fail(ErrorCode::DegenerateCloud, "eyes coincide");
    frame.lateral = across.normalized();
    // Vertical reference: forehead (or eye midpoint) above chin (or nose tip).
    const Eigen::Vector3d top = find(lookup, "forehead").value_or(eye_mid);
    const Eigen::Vector3d bottom = find(lookup, "chin").value_or(*find(lookup, "nose_tip"));
    const Eigen::Vector3d up = top - bottom;
    const Eigen::Vector3d cranial = up - up.dot(frame.lateral) * frame.lateral;
    if (!(cranial.norm() > 1e-12 * (up.norm() + 1.0))) fail(ErrorCode::DegenerateCloud, "face vertical is parallel to the eye line");
    frame.cranial = cranial.normalized();
    midline = eye_mid;
    floor = 0.5 * across.norm();
  }

  frame.anterior = toward_camera(frame.lateral.cross(frame.cranial), centroid);
  frame.frontal = body_plane(centroid, frame.anterior, frame.cranial, landmarks, floor);
  frame.median = body_plane(midline, toward_camera(frame.lateral, midline), frame.cranial, landmarks, floor);
  return frame;
}

}  // namespace parallax
