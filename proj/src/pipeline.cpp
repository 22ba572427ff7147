#include "parallax/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

#include "parallax/error.hpp"
#include "parallax/image_io.hpp"
#include "parallax/vpdsl/corpus.hpp"
#include "parallax/vpdsl/interpreter.hpp"
#include "parallax/vpdsl/parser.hpp"
#include "resources/embedded.hpp"

namespace parallax {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ProgramRun {
  std::variant<ParametricAnchor, vpdsl::ProgramDiagnostic> outcome;
  double masking = 0.0;
  double extraction = 0.0;
};

ProgramRun run_one(const GeneratedProgram& program, const DepthScene& scene, const ServiceBundle& services,
                   std::uint64_t seed) {
  const auto start = Clock::now();
  vpdsl::ParseResult parsed = vpdsl::parse_program(program.text);
  if (!parsed.ok()) return {parsed.diagnostics.front(), 0.0, seconds_since(start)};
  vpdsl::InterpretResult r = vpdsl::interpret_program(parsed.program, scene, services, seed);
  const double total = seconds_since(start);
  return {std::move(r.outcome), r.masking_seconds, std::max(0.0, total - r.masking_seconds)};
}

}  // namespace

Json to_json(const PipelineReport& report) {
  Json diags = Json::array();
  for (const auto& d : report.diagnostics) {
    Json j = vpdsl::to_json(d.diagnostic);
    j["program_index"] = d.program_index;
    diags.push_back(std::move(j));
  }
  Json out = {{"stages",
               {{"depth", report.stages.depth},
                {"masking", report.stages.masking},
                {"extraction", report.stages.extraction},
                {"program_generation", report.stages.program_generation}}},
              {"total_seconds", report.total_seconds},
              {"programs_generated", report.programs_generated},
              {"programs_succeeded", report.programs_succeeded},
              {"diagnostics", diags}};
  if (report.generation_error) out["generation_error"] = *report.generation_error;
  return out;
}

DepthScene ingest_image(std::span<const std::uint8_t> bytes, const ServiceBundle& services) {
  Image image = decode_image(bytes);
  if (!services.depth) fail(ErrorCode::DepthServiceError, "no depth service configured");
  DepthEstimate estimate = services.depth->estimate(image, bytes);
  if (estimate.depth.width() != image.width() || estimate.depth.height() != image.height()) {
    fail(ErrorCode::DepthServiceError,
         "depth map is " + std::to_string(estimate.depth.width()) + "x" + std::to_string(estimate.depth.height()) +
             " but the image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()));
  }
  PinholeCamera camera = estimate.camera.value_or(default_camera(image.width(), image.height()));
  camera.width = image.width();
  camera.height = image.height();
  DepthScene scene = make_scene(std::move(image), std::move(estimate.depth), camera);
  if (const ValidationReport report = validate_scene(scene); !report.ok())
    fail(ErrorCode::DepthServiceError, "invalid scene: " + report.problems.front());
  return scene;
}

std::string assemble_prompt() {
  std::string examples;
  for (const auto& e : vpdsl::example_corpus()) {
    examples += "Example " + std::to_string(e.number) + ":\n" + e.description + "\nVisual Program:\n" + e.program;
    examples += "\n";
  }
  std::string prompt(resources::text(resources::Resource::PromptTemplate));
  const std::string marker = "{{EXAMPLES}}";
  prompt.replace(prompt.find(marker), marker.size(), examples);
  return prompt;
}

std::vector<GeneratedProgram> generate_programs(const DepthScene& scene, std::span<const std::uint8_t> encoded,
                                                const ServiceBundle& services) {
  if (!services.program) fail(ErrorCode::ProgramServiceError, "no program service configured");
  return services.program->generate(scene.image, encoded, assemble_prompt());
}

void extract_anchors(const DepthScene& scene, std::span<const std::uint8_t> encoded, const ServiceBundle& services,
                     const PipelineOptions& options, SceneDocument& document, PipelineReport& report) {
  std::vector<GeneratedProgram> programs;
  const auto gen_start = Clock::now();
  try {
    programs = generate_programs(scene, encoded, services);
  } catch (const Error& e) {
    report.generation_error = std::string(to_string(e.code())) + ": " + e.what();
  }
  report.stages.program_generation += seconds_since(gen_start);
  report.programs_generated = programs.size();

  const auto phase_start = Clock::now();
  std::vector<ProgramRun> runs(programs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < programs.size(); i = next++)
      runs[i] = run_one(programs[i], scene, services, options.seed + i);
  };
  {
    const unsigned n = std::clamp<unsigned>(options.workers, 1u, std::max<unsigned>(1u, static_cast<unsigned>(programs.size())));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  const double phase = seconds_since(phase_start);

  // Wall time of the concurrent phase, apportioned by the per-program split.
  double masking = 0.0, extraction = 0.0;
  for (const auto& r : runs) {
    masking += r.masking;
    extraction += r.extraction;
  }
  const double busy = masking + extraction;
  report.stages.masking += busy > 0.0 ? phase * masking / busy : 0.0;
  report.stages.extraction += busy > 0.0 ? phase * extraction / busy : phase;

  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (auto* anchor = std::get_if<ParametricAnchor>(&runs[i].outcome)) {
      anchor->id = "anchor_" + std::to_string(i);
      anchor->rationale = programs[i].rationale;
      document.provenance[anchor->id] = {programs[i].text, programs[i].rationale};
      document.anchors.push_back(std::move(*anchor));
      ++report.programs_succeeded;
    } else {
      report.diagnostics.push_back({i, std::get<vpdsl::ProgramDiagnostic>(runs[i].outcome)});
    }
  }
}

PipelineResult run_pipeline(std::span<const std::uint8_t> image_bytes, const ServiceBundle& services,
                            const PipelineOptions& options) {
  const auto start = Clock::now();
  PipelineResult result;
  result.scene = ingest_image(image_bytes, services);
  result.report.stages.depth = seconds_since(start);
  extract_anchors(result.scene, image_bytes, services, options, result.document, result.report);
  result.report.total_seconds = seconds_since(start);
  return result;
}

}  // namespace parallax
