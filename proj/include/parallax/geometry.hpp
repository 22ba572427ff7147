#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "parallax/unproject.hpp"

namespace parallax {

/// {p : normal.p + d = 0}. `primary_dir` lies in the plane; `extent` holds
/// half-sizes along (primary_dir, normal x primary_dir) about `centroid`.
struct Plane {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double d = 0.0;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  Eigen::Vector3d primary_dir = Eigen::Vector3d::UnitX();
  Eigen::Vector2d extent = Eigen::Vector2d::Zero();

  [[nodiscard]] Eigen::Vector3d secondary_dir() const { return normal.cross(primary_dir); }
  [[nodiscard]] double signed_distance(const Eigen::Vector3d& p) const { return normal.dot(p) + d; }

  friend bool operator==(const Plane&, const Plane&) = default;
};

struct Cylinder {
  Eigen::Vector3d axis_point = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis_dir = Eigen::Vector3d::UnitY();
  double radius = 0.0;
  double half_height = 0.0;

  friend bool operator==(const Cylinder&, const Cylinder&) = default;
};

struct Sphere {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;

  friend bool operator==(const Sphere&, const Sphere&) = default;
};

enum class BodyKind { Skeleton, Face };

/// Anatomical frame of a body or face: unit directions toward the head
/// (cranial), out of the chest/face (anterior) and toward the subject's left
/// (lateral), with the frontal and median reference planes.
struct BodyFrame {
  BodyKind kind = BodyKind::Skeleton;
  std::vector<Landmark3D> landmarks;
  Eigen::Vector3d cranial = Eigen::Vector3d::Zero();
  Eigen::Vector3d anterior = Eigen::Vector3d::Zero();
  Eigen::Vector3d lateral = Eigen::Vector3d::Zero();
  Plane frontal;
  Plane median;
};

using Skeleton3D = BodyFrame;
using Face3D = BodyFrame;

}  // namespace parallax
