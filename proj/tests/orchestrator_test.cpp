#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "parallax/document.hpp"
#include "parallax/error.hpp"
#include "parallax/pipeline.hpp"
#include "parallax/scene_io.hpp"
#include "parallax/store.hpp"
#include "parallax/vpdsl/corpus.hpp"
#include "support.hpp"

namespace parallax {
namespace {

namespace fs = std::filesystem;

Bytes fixture_bytes(const std::string& name, const std::string& file = "image.png") {
  return read_file((testing::fixtures_dir() / name / file).string());
}

Json manifest(const std::string& name) {
  return Json::parse(std::ifstream(testing::fixtures_dir() / name / "manifest.json"));
}

ErrorCode error_code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

class Orchestrator : public ::testing::Test {
 protected:
  ServiceBundle services = make_fixture_services(testing::fixtures_dir());
};

TEST_F(Orchestrator, IngestUsesRecordedDepthAndCamera) {
  const DepthScene scene = ingest_image(fixture_bytes("train"), services);
  const DepthScene stored = load_scene_dir((testing::fixtures_dir() / "train").string());
  EXPECT_EQ(scene.depth, decode_dsd(fixture_bytes("train", "depth.dsd")));
  EXPECT_EQ(scene.image, stored.image);
  EXPECT_EQ(scene.camera, stored.camera);
  EXPECT_TRUE(validate_scene(scene).ok());
}

TEST_F(Orchestrator, IngestRejectsCorruptBytes) {
  Bytes bytes = fixture_bytes("train");
  bytes.resize(bytes.size() / 3);
  EXPECT_EQ(error_code_of([&] { ingest_image(bytes, services); }), ErrorCode::DecodeError);
  EXPECT_EQ(error_code_of([&] { ingest_image(Bytes{1, 2, 3}, services); }), ErrorCode::DecodeError);
}

TEST_F(Orchestrator, IngestOfUnrecordedImageIsFixtureMissing) {
  const Bytes png = encode_png(Image(8, 8, Rgba8{1, 2, 3, 255}));
  EXPECT_EQ(error_code_of([&] { ingest_image(png, services); }), ErrorCode::FixtureMissing);
}

TEST_F(Orchestrator, GeneratedProgramsAreTheRecordedOnes) {
  const Bytes bytes = fixture_bytes("mixed");
  const DepthScene scene = ingest_image(bytes, services);
  const auto programs = generate_programs(scene, bytes, services);
  const Json recorded = Json::parse(std::ifstream(testing::fixtures_dir() / "mixed" / "programs.json"));
  ASSERT_EQ(programs.size(), recorded.at("programs").size());
  for (std::size_t i = 0; i < programs.size(); ++i) {
    EXPECT_EQ(programs[i].text, recorded["programs"][i]["text"].get<std::string>());
    EXPECT_EQ(programs[i].rationale, recorded["programs"][i]["rationale"].get<std::string>());
  }
}

TEST(Prompt, EmbedsEveryCorpusExampleOnce) {
  const std::string prompt = assemble_prompt();
  EXPECT_EQ(prompt.find("{{EXAMPLES}}"), std::string::npos);
  for (const auto& ex : vpdsl::example_corpus()) {
    const std::size_t at = prompt.find(ex.program);
    ASSERT_NE(at, std::string::npos) << ex.number;
    const std::string header = "Example " + std::to_string(ex.number) + ":\n";
    const std::size_t h = prompt.find(header);
    ASSERT_NE(h, std::string::npos);
    EXPECT_EQ(prompt.find(header, h + 1), std::string::npos) << "example " << ex.number << " repeated";
    EXPECT_NE(prompt.find(ex.description), std::string::npos);
  }
  EXPECT_EQ(assemble_prompt(), prompt);
}

class FixturePipeline : public Orchestrator, public ::testing::WithParamInterface<std::string> {};

TEST_P(FixturePipeline, MatchesManifest) {
  const Json m = manifest(GetParam());
  const PipelineResult r = run_pipeline(fixture_bytes(GetParam()), services);
  EXPECT_EQ(r.report.programs_generated, m.at("programs_generated").get<std::size_t>());
  EXPECT_EQ(r.report.programs_succeeded, m.at("expected_anchor_count").get<std::size_t>());
  ASSERT_EQ(r.document.anchors.size(), m.at("expected_anchor_count").get<std::size_t>());
  for (std::size_t i = 0; i < r.document.anchors.size(); ++i)
    EXPECT_EQ(to_string(r.document.anchors[i].kind), m["expected_kinds"][i].get<std::string>());
  const Json& want_diags = m.at("expected_diagnostics");
  ASSERT_EQ(r.report.diagnostics.size(), want_diags.size());
  for (std::size_t i = 0; i < want_diags.size(); ++i) {
    EXPECT_EQ(r.report.diagnostics[i].program_index, want_diags[i].at("program_index").get<std::size_t>());
    EXPECT_EQ(to_string(r.report.diagnostics[i].diagnostic.kind), want_diags[i].at("kind").get<std::string>());
    EXPECT_LE(r.report.diagnostics[i].diagnostic.span.end, 10'000u);
  }
  EXPECT_EQ(r.report.programs_succeeded + r.report.diagnostics.size(), r.report.programs_generated);
  EXPECT_FALSE(r.report.generation_error);
}

TEST_P(FixturePipeline, RepeatedRunsAreBitIdentical) {
  const Bytes bytes = fixture_bytes(GetParam());
  const std::string first = encode_anchors(run_pipeline(bytes, services).document.anchors);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(encode_anchors(run_pipeline(bytes, services).document.anchors), first);
  PipelineOptions serial;
  serial.workers = 1;
  EXPECT_EQ(encode_anchors(run_pipeline(bytes, services, serial).document.anchors), first);
}

TEST_P(FixturePipeline, StageTimesAccountForTotal) {
  const PipelineResult r = run_pipeline(fixture_bytes(GetParam()), services);
  const double total = r.report.total_seconds;
  ASSERT_GT(total, 0.0);
  EXPECT_LE(std::abs(r.report.stages.sum() - total), 0.05 * total);
  EXPECT_GE(r.report.stages.depth, 0.0);
  EXPECT_GE(r.report.stages.masking, 0.0);
  EXPECT_GE(r.report.stages.extraction, 0.0);
  EXPECT_GE(r.report.stages.program_generation, 0.0);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, FixturePipeline, ::testing::Values("train", "mixed", "portrait", "allfail"));

TEST_F(Orchestrator, MixedFixtureDegradesGracefully) {
  const PipelineResult r = run_pipeline(fixture_bytes("mixed"), services);
  ASSERT_EQ(r.document.anchors.size(), 3u);
  EXPECT_EQ(r.document.anchors[0].id, "anchor_0");
  EXPECT_EQ(r.document.anchors[1].id, "anchor_1");
  EXPECT_EQ(r.document.anchors[2].id, "anchor_3");
  ASSERT_EQ(r.report.diagnostics.size(), 1u);
  const auto& d = r.report.diagnostics[0];
  EXPECT_EQ(d.program_index, 2u);
  EXPECT_EQ(d.diagnostic.kind, vpdsl::DiagnosticKind::NotAnchorTerminal);
  EXPECT_EQ(d.diagnostic.statement, 2u);
  // Provenance records the program and rationale behind each anchor.
  for (const auto& a : r.document.anchors) {
    ASSERT_TRUE(r.document.provenance.count(a.id));
    EXPECT_EQ(r.document.provenance.at(a.id).rationale, a.rationale);
    EXPECT_FALSE(r.document.provenance.at(a.id).program_text.empty());
  }
}

TEST_F(Orchestrator, ReportJsonShape) {
  const PipelineResult r = run_pipeline(fixture_bytes("mixed"), services);
  const Json j = to_json(r.report);
  for (const char* k : {"depth", "masking", "extraction", "program_generation"}) EXPECT_TRUE(j.at("stages").contains(k));
  EXPECT_EQ(j.at("programs_generated"), 4);
  EXPECT_EQ(j.at("programs_succeeded"), 3);
  ASSERT_EQ(j.at("diagnostics").size(), 1u);
  EXPECT_EQ(j["diagnostics"][0].at("program_index"), 2);
  EXPECT_EQ(j["diagnostics"][0].at("kind"), "NotAnchorTerminal");
  EXPECT_FALSE(j.contains("generation_error"));
}

TEST_F(Orchestrator, GeneratorFailureYieldsEmptyRunNotError) {
  struct Broken : ProgramClient {
    std::vector<GeneratedProgram> generate(const Image&, std::span<const std::uint8_t>, const std::string&) override {
      fail(ErrorCode::ProgramServiceError, "model offline");
    }
  };
  ServiceBundle stub = services;
  stub.program = std::make_shared<Broken>();
  const PipelineResult r = run_pipeline(fixture_bytes("train"), stub);
  EXPECT_EQ(r.report.programs_generated, 0u);
  EXPECT_TRUE(r.document.anchors.empty());
  ASSERT_TRUE(r.report.generation_error);
  EXPECT_NE(r.report.generation_error->find("ProgramServiceError"), std::string::npos);
}

TEST_F(Orchestrator, DepthOfWrongSizeIsRejected) {
  struct Tiny : DepthClient {
    DepthEstimate estimate(const Image&, std::span<const std::uint8_t>) override { return {DepthMap(2, 2, 1.0f), {}}; }
  };
  ServiceBundle stub = services;
  stub.depth = std::make_shared<Tiny>();
  EXPECT_EQ(error_code_of([&] { ingest_image(fixture_bytes("train"), stub); }), ErrorCode::DepthServiceError);
}

TEST_F(Orchestrator, MissingIntrinsicsFallBackToDefaultCamera) {
  struct NoCamera : DepthClient {
    DepthEstimate estimate(const Image& image, std::span<const std::uint8_t>) override {
      return {DepthMap(image.width(), image.height(), 2.0f), std::nullopt};
    }
  };
  ServiceBundle stub = services;
  stub.depth = std::make_shared<NoCamera>();
  const DepthScene scene = ingest_image(fixture_bytes("train"), stub);
  EXPECT_EQ(scene.camera, default_camera(scene.width(), scene.height()));
}

TEST(RemoteConfig, DefaultsAndOverrides) {
  const RemoteConfig c = parse_remote_config(R"({"depth":{"url_env":"MY_DEPTH","timeout_s":2.5}})");
  EXPECT_EQ(c.depth.url_env, "MY_DEPTH");
  EXPECT_EQ(c.depth.token_env, "PARALLAX_DEPTH_TOKEN");
  EXPECT_EQ(c.depth.timeout, std::chrono::milliseconds(2500));
  EXPECT_EQ(c.program.url_env, "PARALLAX_PROGRAM_URL");
}

TEST(RemoteConfig, LiteralSecretsAreRejected) {
  EXPECT_EQ(error_code_of([] { parse_remote_config(R"({"segment":{"url":"http://x"}})"); }), ErrorCode::FormatError);
  EXPECT_EQ(error_code_of([] { parse_remote_config(R"({"program":{"token":"sk-123"}})"); }), ErrorCode::FormatError);
  EXPECT_EQ(error_code_of([] { parse_remote_config("{not json"); }), ErrorCode::FormatError);
}

TEST(RemoteServices, UnsetOrUnreachableEndpointIsServiceError) {
  RemoteConfig config;
  config.depth.url_env = "PARALLAX_TEST_DEPTH_URL";
  config.depth.token_env = "PARALLAX_TEST_DEPTH_TOKEN";
  config.depth.timeout = std::chrono::seconds(2);
  const ServiceBundle remote = make_remote_services(config);
  const Bytes bytes = fixture_bytes("train");

  ::unsetenv("PARALLAX_TEST_DEPTH_URL");
  EXPECT_EQ(error_code_of([&] { ingest_image(bytes, remote); }), ErrorCode::DepthServiceError);

  ::setenv("PARALLAX_TEST_DEPTH_URL", "http://127.0.0.1:1/depth", 1);
  EXPECT_EQ(error_code_of([&] { ingest_image(bytes, remote); }), ErrorCode::DepthServiceError);

  ::setenv("PARALLAX_TEST_DEPTH_URL", "not a url", 1);
  EXPECT_EQ(error_code_of([&] { ingest_image(bytes, remote); }), ErrorCode::DepthServiceError);
  ::unsetenv("PARALLAX_TEST_DEPTH_URL");
}

TEST(Fingerprints, IndependentOfEncoding) {
  const Image a(3, 2, Rgba8{1, 2, 3, 4});
  EXPECT_EQ(image_fingerprint(a), image_fingerprint(decode_png(encode_png(a))));
  EXPECT_NE(image_fingerprint(a), image_fingerprint(Image(2, 3, Rgba8{1, 2, 3, 4})));
  EXPECT_EQ(image_fingerprint(a).size(), 64u);
  EXPECT_EQ(prompt_fingerprint("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Store, ScenesAreContentAddressed) {
  testing::TempDir dir;
  DocumentStore store(dir.path());
  const Bytes bytes = fixture_bytes("portrait");
  const DepthScene scene = ingest_image(bytes, make_fixture_services(testing::fixtures_dir()));
  const std::string id = store.put_scene(scene, bytes);
  EXPECT_EQ(id, scene_id_for_upload(bytes));
  EXPECT_EQ(store.put_scene(scene, bytes), id);
  EXPECT_TRUE(store.has_scene(id));
  EXPECT_EQ(*store.scene(id), scene);
  EXPECT_EQ(store.scene_upload(id), bytes);
  EXPECT_EQ(*DocumentStore(dir.path()).scene(id), scene);  // survives a restart
}

TEST(Store, DocumentsPersistAndNumberSequentially) {
  testing::TempDir dir;
  DocumentStore store(dir.path());
  const Bytes bytes = fixture_bytes("train");
  const PipelineResult r = run_pipeline(bytes, make_fixture_services(testing::fixtures_dir()));
  const std::string sid = store.put_scene(r.scene, bytes);
  store.put_pipeline(sid, r.document, r.report);
  const auto saved = store.pipeline_document(sid);
  ASSERT_TRUE(saved);
  EXPECT_EQ(saved->anchors, r.document.anchors);

  const std::string d1 = store.create_document(sid, r.document.anchors, r.document.provenance);
  const std::string d2 = store.create_document(sid, {}, {});
  EXPECT_EQ(d1, "doc_1");
  EXPECT_EQ(d2, "doc_2");
  SceneDocument doc = store.load_document(d1);
  EXPECT_EQ(doc.scene_id, sid);
  EXPECT_EQ(doc.anchors, r.document.anchors);
  doc.layers.push_back({"layer_1", doc.anchors[0].id, Image(2, 2, Rgba8{9, 9, 9, 255})});
  store.save_document(doc);
  EXPECT_EQ(encode_document(DocumentStore(dir.path()).load_document(d1)), encode_document(doc));
  EXPECT_EQ(DocumentStore(dir.path()).create_document(sid, {}, {}), "doc_3");
}

TEST(Store, UnknownIdsAreNotFound) {
  testing::TempDir dir;
  DocumentStore store(dir.path());
  EXPECT_EQ(error_code_of([&] { store.scene("scene_missing"); }), ErrorCode::NotFound);
  EXPECT_EQ(error_code_of([&] { store.load_document("doc_9"); }), ErrorCode::NotFound);
  EXPECT_EQ(error_code_of([&] { store.load_document("../../etc/passwd"); }), ErrorCode::NotFound);
  EXPECT_EQ(error_code_of([&] { store.create_document("scene_missing", {}, {}); }), ErrorCode::NotFound);
  EXPECT_FALSE(store.pipeline_document("scene_missing"));
}

}  // namespace
}  // namespace parallax
