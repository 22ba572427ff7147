#include "parallax/vpdsl/cells.hpp"

#include <algorithm>
#include <cctype>

namespace parallax::vpdsl {
namespace {

using VT = ValueType;

const std::vector<CellSpec>& registry() {
  static const std::vector<CellSpec> cells = {
      {CellId::Text2Mask, "Text2Mask", {{"prompt", {VT::String}}}, VT::Mask},
      {CellId::Mask2Pointcloud, "Mask2Pointcloud", {{"mask", {VT::Mask}}}, VT::PointCloud},
      {CellId::Pointcloud2Plane, "Pointcloud2Plane", {{"pointcloud", {VT::PointCloud}}}, VT::Plane},
      {CellId::Pointcloud2Cylinder,
       "Pointcloud2Cylinder",
       {{"pointcloud", {VT::PointCloud}}, {"direction", {VT::Direction, VT::Null}, true}},
       VT::Cylinder},
      {CellId::Pointcloud2Sphere, "Pointcloud2Sphere", {{"pointcloud", {VT::PointCloud}}}, VT::Sphere},
      {CellId::SkeletonExtraction, "SkeletonExtraction", {{"mask", {VT::Mask}}}, VT::Skeleton},
      {CellId::FaceExtraction, "FaceExtraction", {{"mask", {VT::Mask}}}, VT::Face},
      {CellId::Planar, "Planar", {{"plane", {VT::Plane}}}, VT::Anchor},
      {CellId::Cylindrical, "Cylindrical", {{"cylinder", {VT::Cylinder}}}, VT::Anchor},
      {CellId::Spherical, "Spherical", {{"sphere", {VT::Sphere}}}, VT::Anchor},
  };
  return cells;
}

}  // namespace

bool iequals(std::string_view a, std::string_view b) noexcept {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::string_view to_string(ValueType type) noexcept {
  switch (type) {
    case VT::Mask: return "Mask";
    case VT::PointCloud: return "PointCloud";
    case VT::Plane: return "Plane";
    case VT::Cylinder: return "Cylinder";
    case VT::Sphere: return "Sphere";
    case VT::Skeleton: return "Skeleton";
    case VT::Face: return "Face";
    case VT::Anchor: return "Anchor";
    case VT::Direction: return "Direction";
    case VT::Null: return "NULL";
    case VT::String: return "String";
  }
  return "?";
}

std::span<const CellSpec> cell_registry() { return registry(); }

const CellSpec* find_cell(std::string_view name) {
  const auto& cells = registry();
  auto by_id = [&](CellId id) { return &*std::find_if(cells.begin(), cells.end(), [&](const auto& c) { return c.id == id; }); };
  if (iequals(name, "Pointcloud2Skeleton")) return by_id(CellId::SkeletonExtraction);
  if (iequals(name, "Pointcloud2Face")) return by_id(CellId::FaceExtraction);
  for (const auto& cell : cells)
    if (iequals(cell.name, name)) return &cell;
  return nullptr;
}

bool is_anchor_cell(CellId id) noexcept {
  return id == CellId::Planar || id == CellId::Cylindrical || id == CellId::Spherical;
}

std::optional<ValueType> attribute_type(ValueType base, std::string_view attribute) {
  if (base == VT::Plane) {
    if (attribute == "extruded") return VT::Plane;
    if (attribute == "primary") return VT::Direction;
  }
  if (base == VT::Skeleton || base == VT::Face) {
    if (attribute == "frontal" || attribute == "median") return VT::Plane;
    if (attribute == "cranial" || attribute == "anterior") return VT::Direction;
  }
  return std::nullopt;
}

}  // namespace parallax::vpdsl
