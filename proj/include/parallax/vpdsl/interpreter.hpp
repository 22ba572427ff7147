#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "parallax/anchors.hpp"
#include "parallax/geometry.hpp"
#include "parallax/scene.hpp"
#include "parallax/services.hpp"
#include "parallax/unproject.hpp"
#include "parallax/vpdsl/cells.hpp"
#include "parallax/vpdsl/diagnostics.hpp"
#include "parallax/vpdsl/program.hpp"

namespace parallax::vpdsl {

struct Direction {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
};

struct NullValue {};

/// Runtime values flowing between cells.
using ProgramValue =
    std::variant<std::shared_ptr<const Mask>, std::shared_ptr<const PointCloud>, Plane, Cylinder,
                 Sphere, std::shared_ptr<const BodyFrame>, ParametricAnchor, Direction, NullValue>;

ValueType type_of(const ProgramValue& value) noexcept;

struct InterpretOptions {
  int clean_neighbors = 8;
  double clean_sigma = 2.0;
  double ransac_threshold = 0.01;
  int ransac_iterations = 500;
};

struct Provenance {
  std::string program_text;
  std::string rationale;
};

struct InterpretResult {
  std::variant<ParametricAnchor, ProgramDiagnostic> outcome;
  Provenance provenance;
  /// Seconds spent inside segmentation service calls; the rest is extraction.
  double masking_seconds = 0.0;
  double extraction_seconds = 0.0;

  [[nodiscard]] bool ok() const noexcept { return outcome.index() == 0; }
  [[nodiscard]] const ParametricAnchor& anchor() const { return std::get<ParametricAnchor>(outcome); }
  [[nodiscard]] const ProgramDiagnostic& diagnostic() const { return std::get<ProgramDiagnostic>(outcome); }
};

/// Executes a type-checked program statement by statement. Every statement
/// runs, including ones whose results go unused. Cell failures surface as a
/// RuntimeFailure diagnostic naming the cell and cause; a program that does
/// not typecheck returns its first diagnostic without running.
InterpretResult interpret_program(const VisualProgram& program, const DepthScene& scene,
                                  const ServiceBundle& services, std::uint64_t seed,
                                  const InterpretOptions& options = {});

/// Seed handed to the randomized routine of statement `index`.
std::uint64_t statement_seed(std::uint64_t seed, std::size_t index) noexcept;

}  // namespace parallax::vpdsl
