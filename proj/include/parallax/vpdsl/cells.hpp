#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace parallax::vpdsl {

enum class ValueType { Mask, PointCloud, Plane, Cylinder, Sphere, Skeleton, Face, Anchor, Direction, Null, String };

std::string_view to_string(ValueType type) noexcept;

enum class CellId {
  Text2Mask,
  Mask2Pointcloud,
  Pointcloud2Plane,
  Pointcloud2Cylinder,
  Pointcloud2Sphere,
  SkeletonExtraction,
  FaceExtraction,
  Planar,
  Cylindrical,
  Spherical,
};

struct ParamSpec {
  std::string_view name;
  std::vector<ValueType> accepts;
  bool optional = false;
};

struct CellSpec {
  CellId id;
  std::string_view name;
  std::vector<ParamSpec> params;
  ValueType result;
};

/// Closed registry. Lookup is case-insensitive; Pointcloud2Skeleton and
/// Pointcloud2Face resolve to the skeleton/face extraction cells.
const CellSpec* find_cell(std::string_view name);
std::span<const CellSpec> cell_registry();

bool is_anchor_cell(CellId id) noexcept;

/// Type of `base.attribute`, or nullopt when the attribute is not defined on
/// values of `base`.
std::optional<ValueType> attribute_type(ValueType base, std::string_view attribute);

bool iequals(std::string_view a, std::string_view b) noexcept;

}  // namespace parallax::vpdsl
