#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parallax/json.hpp"

#include "parallax/document.hpp"
#include "parallax/scene.hpp"
#include "parallax/services.hpp"
#include "parallax/vpdsl/diagnostics.hpp"

namespace parallax {

struct StageTimes {
  double depth = 0.0;
  double masking = 0.0;
  double extraction = 0.0;
  double program_generation = 0.0;

  [[nodiscard]] double sum() const noexcept {
    return depth + masking + extraction + program_generation;
  }
};

struct ProgramOutcome {
  std::size_t program_index = 0;
  vpdsl::ProgramDiagnostic diagnostic;
};

struct PipelineReport {
  StageTimes stages;
  double total_seconds = 0.0;
  std::size_t programs_generated = 0;
  std::size_t programs_succeeded = 0;
  std::vector<ProgramOutcome> diagnostics;
  /// Set when the program generator failed; the run then has no programs.
  std::optional<std::string> generation_error;
};

Json to_json(const PipelineReport& report);

/// Decodes the image, obtains depth (and intrinsics, falling back to the
/// default camera), assembles and validates the scene. Throws DecodeError,
/// DepthServiceError, FixtureMissing.
DepthScene ingest_image(std::span<const std::uint8_t> bytes, const ServiceBundle& services);

/// Prompt sent to the program generator: the versioned instruction template
/// with every corpus example embedded once.
std::string assemble_prompt();

std::vector<GeneratedProgram> generate_programs(const DepthScene& scene,
                                                std::span<const std::uint8_t> encoded,
                                                const ServiceBundle& services);

struct PipelineOptions {
  std::uint64_t seed = 0;
  unsigned workers = 4;
};

struct PipelineResult {
  DepthScene scene;
  SceneDocument document;
  PipelineReport report;
};

/// Interprets programs concurrently (program i gets seed + i); failures
/// become per-program diagnostics, successes become anchors "anchor_<i>".
/// Only ingest errors propagate.
PipelineResult run_pipeline(std::span<const std::uint8_t> image_bytes,
                            const ServiceBundle& services, const PipelineOptions& options = {});

/// Program stage of run_pipeline for an already ingested scene.
void extract_anchors(const DepthScene& scene, std::span<const std::uint8_t> encoded,
                     const ServiceBundle& services, const PipelineOptions& options,
                     SceneDocument& document, PipelineReport& report);

}  // namespace parallax
