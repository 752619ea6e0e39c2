// Copyright 2026 The Rerend Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <json.hpp>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "pipeline/config.hpp"
#include "pipeline/pipeline.hpp"
#include "pipeline/serve.hpp"

// Last: <resolv.h> (pulled in by httplib) defines a `_res` macro that
// collides with Eigen parameter names.
#include <httplib.h>

namespace rerend {
namespace {

namespace fs = std::filesystem;

constexpr const char* kTinyConfig = R"(
# small but complete pipeline
grid_k = 24
decimate_target = 400
train_cameras = 8
train_width = 16
train_height = 16
eval_cameras = 2
eval_width = 16
eval_height = 16
D = 8
pos_depth = 2
pos_width = 16
dir_depth = 2
dir_width = 16
steps = 20
batch = 256
warmup = 5
log_every = 5
p = 3
dir_elev = 8
dir_azim = 8
seed = 7
)";

PipelineConfig tiny(const std::string& name) {
  PipelineConfig cfg = parse_config(kTinyConfig);
  cfg.out = fs::temp_directory_path() / ("rerend_test_pipeline_" + name);
  fs::remove_all(cfg.out);
  return cfg;
}

TEST(Config, ParsesKeysCommentsAndOverrides) {
  const PipelineConfig cfg = parse_config("D = 16  # comment\n\n  p=4\nbackground = 0, 0.5, 1\nscene = boxgrid\n");
  EXPECT_EQ(cfg.arch.dim, 16);
  EXPECT_EQ(cfg.p, 4);
  EXPECT_EQ(cfg.background, Rgb(0, 0.5, 1));
  EXPECT_EQ(cfg.scene, SceneKind::kBoxGrid);
  EXPECT_EQ(get_config_value(cfg, "p"), "4");
}

TEST(Config, UnknownKeysAndBadValuesAreConfigErrors) {
  for (const char* text : {"stpes = 10\n", "steps = ten\n", "steps\n", "cosine = maybe\n", "background = 1,1\n",
                           "scene = torus\n"}) {
    try {
      parse_config(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfig) << text;
    }
  }
  PipelineConfig cfg;
  cfg.arch.dim = 6;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Config, HelpDocumentsEveryKeyAndDumpRoundTrips) {
  const std::string help = config_help();
  for (const std::string& key : config_keys()) EXPECT_NE(help.find("  " + key + " "), std::string::npos) << key;
  const PipelineConfig a = tiny("dump");
  const PipelineConfig b = parse_config(dump_config(a));
  EXPECT_EQ(dump_config(a), dump_config(b));
}

TEST(Pipeline, DistillSphereIsClosedAndDeterministic) {
  PipelineConfig cfg = tiny("distill");
  cfg.grid_k = 64;
  cfg.decimate_target = 0;
  const DistillResult a = distill_mesh(cfg);
  EXPECT_EQ(a.report.boundary_edges, 0u);
  EXPECT_EQ(a.report.non_manifold_edges, 0u);
  EXPECT_EQ(a.report.components, 1u);
  EXPECT_EQ(encode_obj(a.mesh), encode_obj(distill_mesh(cfg).mesh));
  const auto j = nlohmann::json::parse(mesh_report_json(a));
  EXPECT_EQ(j["boundary_edges"], 0);
}

TEST(Pipeline, UnboundedAddsDome) {
  PipelineConfig cfg = tiny("dome");
  const std::size_t bounded = distill_mesh(cfg).mesh.faces.size();
  cfg.unbounded = true;
  cfg.dome_subdivisions = 3;
  EXPECT_EQ(distill_mesh(cfg).mesh.faces.size(), bounded + dome_face_count(3));
}

TEST(Pipeline, ZeroStepsKeepsInitAndHistoryMatchesLogging) {
  PipelineConfig cfg = tiny("train");
  const DistillResult d = distill_mesh(cfg);
  const PseudoImageSet pseudo = make_pseudo_images(cfg);
  cfg.train.steps = 0;
  cfg.train.warmup = 0;
  const TrainResult zero = train_field(cfg, d.mesh, pseudo);
  EXPECT_EQ(encode_checkpoint(zero.field), encode_checkpoint(initial_field(cfg)));
  EXPECT_TRUE(zero.history.empty());
  cfg.train.steps = 20;
  cfg.train.warmup = 5;
  const TrainResult r = train_field(cfg, d.mesh, pseudo);
  EXPECT_EQ(r.history.size(), 5u);  // steps 0, 5, 10, 15 and the last step 19
  EXPECT_EQ(nlohmann::json::parse(history_json(r.history)).size(), r.history.size());
}

TEST(Pipeline, BakeMatchesConfigAndIsByteDeterministic) {
  PipelineConfig cfg = tiny("bake");
  const DistillResult d = distill_mesh(cfg);
  const FactorizedField f = initial_field(cfg);
  write_asset_package(cfg.out / "a", bake(cfg, f, d.mesh));
  write_asset_package(cfg.out / "b", bake(cfg, f, d.mesh));
  const AssetPackage back = read_asset_package(cfg.out / "a");
  EXPECT_EQ(back.layout.p, cfg.p);
  EXPECT_EQ(back.dim, cfg.arch.dim);
  for (const char* png : {"m_u.png", "m_v.png", "m_w.png", "m_beta.png"}) {
    EXPECT_EQ(read_file_bytes(cfg.out / "a" / png), read_file_bytes(cfg.out / "b" / png)) << png;
  }
  const EvalReport report = evaluate(cfg, back, &f);
  EXPECT_EQ(report.vs_oracle.size(), 2u);
  EXPECT_EQ(report.vs_float.size(), 2u);
  fs::remove_all(cfg.out);
}

TEST(Pipeline, SingleValueSweepHasOneRow) {
  PipelineConfig cfg = tiny("sweep");
  const DistillResult d = distill_mesh(cfg);
  const FactorizedField f = initial_field(cfg);
  const auto rows = sweep(cfg, SweepAxis::kTexels, {4}, d.mesh, &f);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].value, 4.0);
  EXPECT_GT(rows[0].package_bytes, 0u);
  const std::string csv = sweep_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "value,psnr,ssim,package_bytes");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_THROW(parse_sweep_axis("colour"), Error);
  fs::remove_all(cfg.out);
}

TEST(Serve, ServesPackageFilesWithCors) {
  PipelineConfig cfg = tiny("serve");
  const DistillResult d = distill_mesh(cfg);
  write_asset_package(cfg.out, bake(cfg, initial_field(cfg), d.mesh));
  StaticServer server;
  const int port = server.start(cfg.out, "127.0.0.1", 0);
  ASSERT_GT(port, 0);
  httplib::Client client("127.0.0.1", port);
  const auto manifest = client.Get("/manifest.json");
  ASSERT_TRUE(manifest);
  EXPECT_EQ(manifest->status, 200);
  EXPECT_EQ(manifest->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(nlohmann::json::parse(manifest->body)["D"], 8);
  const auto png = client.Get("/m_beta.png");
  ASSERT_TRUE(png);
  EXPECT_EQ(png->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(std::vector<std::uint8_t>(png->body.begin(), png->body.end()), read_file_bytes(cfg.out / "m_beta.png"));
  const auto obj = client.Get("/mesh.obj");
  ASSERT_TRUE(obj);
  EXPECT_EQ(obj->body, read_text_file(cfg.out / "mesh.obj"));
  const auto preflight = client.Options("/manifest.json");
  ASSERT_TRUE(preflight);
  EXPECT_EQ(preflight->status, 204);
  EXPECT_EQ(preflight->get_header_value("Access-Control-Allow-Origin"), "*");
  const auto missing = client.Get("/nope.png");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  server.stop();
  fs::remove_all(cfg.out);
}

}  // namespace
}  // namespace rerend
