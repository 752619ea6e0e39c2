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

// Exercises the public C interface only, plus the CLI built on it.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "rerend/rerend.h"

namespace {

namespace fs = std::filesystem;

#define RR_ASSERT_OK(call) ASSERT_EQ((call), RR_OK) << rr_last_error()

const char* const kTiny[][2] = {
    {"grid_k", "24"},        {"decimate_target", "300"}, {"train_cameras", "6"}, {"train_width", "16"},
    {"train_height", "16"},  {"eval_cameras", "2"},      {"eval_width", "16"},   {"eval_height", "16"},
    {"D", "8"},              {"pos_depth", "2"},         {"pos_width", "16"},    {"dir_depth", "2"},
    {"dir_width", "16"},     {"steps", "10"},            {"batch", "128"},       {"warmup", "2"},
    {"p", "3"},              {"dir_elev", "6"},          {"dir_azim", "8"},
};

class CApi : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rerend_test_capi_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    RR_ASSERT_OK(rr_config_new(&cfg_));
    for (const auto& kv : kTiny) RR_ASSERT_OK(rr_config_set(cfg_, kv[0], kv[1]));
    RR_ASSERT_OK(rr_config_set(cfg_, "out", dir_.c_str()));
  }
  void TearDown() override {
    rr_config_free(cfg_);
    fs::remove_all(dir_);
  }
  std::string path(const char* name) const { return (dir_ / name).string(); }

  fs::path dir_;
  rr_config* cfg_ = nullptr;
};

TEST_F(CApi, StatusNamesAndExitCodes) {
  EXPECT_STREQ(rr_status_name(RR_OK), "ok");
  EXPECT_STREQ(rr_status_name(RR_ERR_DIMENSION), "dimension");
  EXPECT_EQ(rr_exit_code(RR_OK), 0);
  EXPECT_EQ(rr_exit_code(RR_ERR_CONFIG), 2);
  EXPECT_EQ(rr_exit_code(RR_ERR_NUMERIC), 3);
  EXPECT_EQ(rr_exit_code(RR_ERR_IO), 4);
  EXPECT_EQ(rr_exit_code(RR_ERR_DECODE), 4);
  EXPECT_NE(std::string(rr_config_help()).find("decimate_target"), std::string::npos);
}

TEST_F(CApi, ConfigErrors) {
  EXPECT_EQ(rr_config_set(cfg_, "no_such_key", "1"), RR_ERR_CONFIG);
  EXPECT_NE(std::string(rr_last_error()).find("no_such_key"), std::string::npos);
  EXPECT_EQ(rr_config_set(nullptr, "p", "1"), RR_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(rr_config_load(cfg_, path("missing.cfg").c_str()), RR_ERR_CONFIG);
  char* value = nullptr;
  RR_ASSERT_OK(rr_config_get(cfg_, "D", &value));
  EXPECT_STREQ(value, "8");
  rr_string_free(value);
  RR_ASSERT_OK(rr_config_set(cfg_, "D", "6"));
  EXPECT_EQ(rr_config_validate(cfg_), RR_ERR_CONFIG);
}

TEST_F(CApi, EndToEnd) {
  char* report = nullptr;
  RR_ASSERT_OK(rr_distill_mesh(cfg_, path("mesh.obj").c_str(), &report));
  EXPECT_NE(std::string(report).find("\"boundary_edges\": 0"), std::string::npos);
  rr_string_free(report);
  char* history = nullptr;
  RR_ASSERT_OK(rr_train(cfg_, path("mesh.obj").c_str(), path("field.ckpt").c_str(), &history));
  rr_string_free(history);
  RR_ASSERT_OK(rr_bake(cfg_, path("mesh.obj").c_str(), path("field.ckpt").c_str(), path("package").c_str()));

  rr_package* pkg = nullptr;
  RR_ASSERT_OK(rr_package_open(path("package").c_str(), &pkg));
  rr_package_info info{};
  RR_ASSERT_OK(rr_package_info_get(pkg, &info));
  EXPECT_EQ(info.dim, 8);
  EXPECT_EQ(info.p, 3);
  EXPECT_EQ(info.texels_per_face, 5);
  EXPECT_EQ(info.factorized, 1);

  rr_camera cam{{0, 0.5, 3.5}, {0, 0, 0}, 40.0, 24, 20};
  rr_image* a = nullptr;
  rr_image* b = nullptr;
  RR_ASSERT_OK(rr_render(pkg, &cam, nullptr, &a));
  RR_ASSERT_OK(rr_render(pkg, &cam, nullptr, &b));
  EXPECT_EQ(rr_image_width(a), 24);
  EXPECT_EQ(rr_image_height(a), 20);
  double db = 0.0;
  RR_ASSERT_OK(rr_image_psnr(a, b, &db));
  EXPECT_TRUE(std::isinf(db));
  RR_ASSERT_OK(rr_image_write_png(a, path("view.png").c_str()));
  RR_ASSERT_OK(rr_image_write_pfm(a, path("view.pfm").c_str()));
  EXPECT_EQ(fs::file_size(path("view.pfm")), 24u * 20u * 12u + std::string("PF\n24 20\n-1.0\n").size());
  double s = 0.0;
  RR_ASSERT_OK(rr_image_ssim(a, b, &s));
  EXPECT_DOUBLE_EQ(s, 1.0);
  rr_camera small{{0, 0.5, 3.5}, {0, 0, 0}, 40.0, 8, 8};
  rr_image* c = nullptr;
  RR_ASSERT_OK(rr_render(pkg, &small, nullptr, &c));
  EXPECT_EQ(rr_image_psnr(a, c, &db), RR_ERR_DIMENSION);
  EXPECT_EQ(rr_image_ssim(c, c, &s), RR_ERR_DIMENSION);  // smaller than the 11x11 window
  rr_image_free(c);
  rr_image_free(a);
  rr_image_free(b);
  rr_package_free(pkg);

  char* eval = nullptr;
  RR_ASSERT_OK(rr_eval(cfg_, path("package").c_str(), path("field.ckpt").c_str(), &eval));
  EXPECT_NE(std::string(eval).find("vs_float"), std::string::npos);
  rr_string_free(eval);
  char* csv = nullptr;
  RR_ASSERT_OK(rr_sweep(cfg_, "texels", "2,3", path("mesh.obj").c_str(), path("field.ckpt").c_str(), &csv));
  EXPECT_EQ(std::string(csv).substr(0, 29), "value,psnr,ssim,package_bytes");
  rr_string_free(csv);
  EXPECT_EQ(rr_sweep(cfg_, "texels", "2,x", path("mesh.obj").c_str(), path("field.ckpt").c_str(), &csv), RR_ERR_CONFIG);
}

TEST_F(CApi, PackageErrorsAreDistinct) {
  rr_package* pkg = nullptr;
  EXPECT_EQ(rr_package_open(path("nothing").c_str(), &pkg), RR_ERR_MISSING_FILE);
  EXPECT_NE(std::string(rr_last_error()).find("manifest.json"), std::string::npos);
  EXPECT_EQ(rr_bake(cfg_, path("nothing.obj").c_str(), path("nothing.ckpt").c_str(), path("pkg").c_str()),
            RR_ERR_MISSING_FILE);
}

TEST_F(CApi, ServerStartsAndStops) {
  rr_server* server = nullptr;
  RR_ASSERT_OK(rr_serve_start(dir_.c_str(), "127.0.0.1", 0, &server));
  EXPECT_GT(rr_server_port(server), 0);
  rr_server_stop(server);
  rr_server_free(server);
  EXPECT_EQ(rr_serve_start(path("absent").c_str(), "127.0.0.1", 0, &server), RR_ERR_MISSING_FILE);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(REREND_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(CApi, CliExitCodes) {
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("--set nope=1 print-config"), 2);
  EXPECT_EQ(run_cli("--set steps=abc print-config"), 2);
  EXPECT_EQ(run_cli("render --package " + path("missing") + " -o " + path("x.png")), 4);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  // Training that diverges is a numeric failure.
  std::ofstream(path("div.cfg")) << "grid_k = 24\ndecimate_target = 300\ntrain_cameras = 4\ntrain_width = 8\n"
                                    "train_height = 8\nD = 4\npos_depth = 2\npos_width = 8\ndir_depth = 2\n"
                                    "dir_width = 8\nsteps = 50\nbatch = 64\nwarmup = 0\nlr = 1e300\nout = "
                                 << dir_.string() << "\n";
  ASSERT_EQ(run_cli("-c " + path("div.cfg") + " distill-mesh"), 0);
  EXPECT_EQ(run_cli("-c " + path("div.cfg") + " train"), 3);
  // A full CLI pass.
  std::string sets;
  for (const auto& kv : kTiny) sets += std::string(" --set ") + kv[0] + "=" + kv[1];
  sets += " --set out=" + (dir_ / "cli").string();
  ASSERT_EQ(run_cli(sets + " distill-mesh"), 0);
  ASSERT_EQ(run_cli(sets + " --threads 1 train"), 0);
  ASSERT_EQ(run_cli(sets + " bake"), 0);
  ASSERT_EQ(run_cli(sets + " render --orbit 20,45,3.5 --width 16 --height 16 -o " + path("cli.png")), 0);
  EXPECT_TRUE(fs::exists(path("cli.png")));
  ASSERT_EQ(run_cli(sets + " eval -o " + path("eval.json")), 0);
  EXPECT_GT(fs::file_size(path("eval.json")), 0u);
}

}  // namespace
