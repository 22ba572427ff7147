#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "parallax/document.hpp"
#include "parallax/error.hpp"
#include "parallax/image_io.hpp"
#include "parallax/pipeline.hpp"
#include "parallax/render.hpp"
#include "parallax/scene_io.hpp"
#include "parallax/server.hpp"
#include "parallax/store.hpp"
#include "parallax/vpdsl/interpreter.hpp"
#include "parallax/vpdsl/parser.hpp"
#include "parallax/vpdsl/typecheck.hpp"

namespace {

using namespace parallax;

struct GlobalOptions {
  std::string fixtures;
  std::string remote;
  std::uint64_t seed = 0;
};

std::string read_text(const std::string& path) {
  const Bytes b = read_file(path);
  return {b.begin(), b.end()};
}

void write_text(const std::string& path, const std::string& text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

ServiceBundle services_for(const GlobalOptions& g) {
  if (!g.fixtures.empty()) return make_fixture_services(g.fixtures);
  if (!g.remote.empty()) return make_remote_services(parse_remote_config(read_text(g.remote)));
  fail(ErrorCode::InvalidArgument, "one of --fixtures DIR or --remote CONFIG is required");
}

int run_ingest(const GlobalOptions& g, const std::string& image, const std::string& out) {
  const Bytes bytes = read_file(image);
  const DepthScene scene = ingest_image(bytes, services_for(g));
  save_scene_dir(scene, out);
  std::cout << Json{{"scene_dir", out}, {"width", scene.width()}, {"height", scene.height()}}.dump() << "\n";
  return 0;
}

struct PipelineArgs {
  std::string image;
  std::string document_out;
  std::string anchors_out;
  std::string scene_out;
  unsigned workers = 4;
};

int run_pipeline_cmd(const GlobalOptions& g, const PipelineArgs& a) {
  const Bytes bytes = read_file(a.image);
  PipelineResult result = run_pipeline(bytes, services_for(g), {g.seed, a.workers});
  result.document.scene_id = scene_id_for_upload(bytes);
  if (!a.document_out.empty()) write_text(a.document_out, encode_document(result.document));
  if (!a.anchors_out.empty()) write_text(a.anchors_out, encode_anchors(result.document.anchors));
  if (!a.scene_out.empty()) save_scene_dir(result.scene, a.scene_out);
  std::cout << to_json(result.report).dump(2) << "\n";
  return 0;
}

int run_extract(const GlobalOptions& g, const std::string& scene_dir, const std::string& program_file,
                const std::string& out) {
  const DepthScene scene = load_scene_dir(scene_dir);
  const std::string text = read_text(program_file);
  const vpdsl::ParseResult parsed = vpdsl::parse_program(text);
  if (!parsed.ok()) {
    for (const auto& d : parsed.diagnostics) std::cout << vpdsl::to_json(d).dump() << "\n";
    return 1;
  }
  const vpdsl::InterpretResult r = vpdsl::interpret_program(parsed.program, scene, services_for(g), g.seed);
  if (!r.ok()) {
    std::cout << vpdsl::to_json(r.diagnostic()).dump() << "\n";
    return 1;
  }
  ParametricAnchor anchor = r.anchor();
  anchor.id = "anchor_0";
  const std::string body = to_json(anchor).dump(2) + "\n";
  if (out.empty()) std::cout << body;
  else write_text(out, body);
  return 0;
}

int run_render(const std::string& scene_dir, const std::string& document, const std::string& out, int supersample,
               const std::string& overlay) {
  const DepthScene scene = load_scene_dir(scene_dir);
  const SceneDocument doc = decode_document(read_text(document));
  if (const auto problems = validate_document(doc); !problems.empty())
    fail(ErrorCode::FormatError, "invalid document: " + problems.front());
  RenderSettings settings;
  settings.supersample = supersample;
  if (!overlay.empty()) settings.overlay_anchor = overlay;
  write_file(out, export_png(render_document(doc, scene, settings)));
  return 0;
}

int run_validate(const std::string& file) {
  const auto diags = vpdsl::check_program(read_text(file));
  for (const auto& d : diags) std::cout << vpdsl::to_json(d).dump() << "\n";
  return diags.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-aware layout engine: scene ingest, visual programs, anchors and rendering"};
  app.require_subcommand(1);
  GlobalOptions g;
  auto* fixtures = app.add_option("--fixtures", g.fixtures, "Replay recorded model responses from DIR");
  auto* remote = app.add_option("--remote", g.remote, "Remote endpoint config (JSON naming env vars)");
  fixtures->excludes(remote);
  app.add_option("--seed", g.seed, "Seed for randomized fitting");

  std::string image, out, scene_dir, program_file, document, overlay;
  int supersample = 1;
  PipelineArgs pa;

  auto* ingest = app.add_subcommand("ingest", "Decode an image, estimate depth, write a scene directory");
  ingest->add_option("image", image)->required();
  ingest->add_option("-o,--out", out, "Scene directory")->required();

  auto* pipeline = app.add_subcommand("pipeline", "Run the full pipeline on an image");
  pipeline->add_option("image", pa.image)->required();
  pipeline->add_option("-o,--out", pa.document_out, "Write the document JSON");
  pipeline->add_option("--anchors-out", pa.anchors_out, "Write the anchors JSON array");
  pipeline->add_option("--scene-out", pa.scene_out, "Write the ingested scene directory");
  pipeline->add_option("--workers", pa.workers, "Concurrent program interpreters")->check(CLI::Range(1u, 64u));

  auto* extract = app.add_subcommand("extract", "Run one visual program against a scene directory");
  extract->add_option("scene-dir", scene_dir)->required();
  extract->add_option("program", program_file)->required();
  extract->add_option("-o,--out", out, "Write the anchor JSON");

  auto* render = app.add_subcommand("render", "Render a document over its scene to PNG");
  render->add_option("scene-dir", scene_dir)->required();
  render->add_option("document", document)->required();
  render->add_option("-o,--out", out, "Output PNG")->required();
  render->add_option("--supersample", supersample, "Samples per pixel edge")->check(CLI::Range(1, 8));
  render->add_option("--overlay", overlay, "Tint this anchor's surface (hover highlight)");

  auto* validate = app.add_subcommand("validate-program", "Parse and typecheck a program file");
  validate->add_option("file", program_file)->required();

  ServerConfig server;
  std::string store = "parallax-store";
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--host", server.host);
  serve->add_option("--port", server.port)->check(CLI::Range(0, 65535));
  serve->add_option("--store", store, "Document store directory");
  serve->add_option("--workers", server.workers)->check(CLI::Range(1u, 64u));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return run_ingest(g, image, out);
    if (*pipeline) return run_pipeline_cmd(g, pa);
    if (*extract) return run_extract(g, scene_dir, program_file, out);
    if (*render) return run_render(scene_dir, document, out, supersample, overlay);
    if (*validate) return run_validate(program_file);
    if (*serve) {
      server.store = store;
      server.services = services_for(g);
      ApiServer api(server);
      const int port = api.bind();
      std::cerr << "listening on " << server.host << ":" << port << "\n";
      api.listen();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
