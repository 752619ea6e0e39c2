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

// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rerend/rerend.h"

namespace {

namespace fs = std::filesystem;

struct Failure {
  rr_status status;
};

void check(rr_status s) {
  if (s != RR_OK) throw Failure{s};
}

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { rr_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

struct Config {
  rr_config* cfg = nullptr;
  Config() { check(rr_config_new(&cfg)); }
  ~Config() { rr_config_free(cfg); }
  std::string get(const char* key) const {
    OwnedString v;
    check(rr_config_get(cfg, key, &v.s));
    return v.str();
  }
};

[[noreturn]] void usage_error(const std::string& message) {
  std::fprintf(stderr, "error: config: %s\n", message.c_str());
  std::exit(2);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::fprintf(stderr, "error: io: cannot write %s\n", path.string().c_str());
    std::exit(4);
  }
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::vector<double> triple(const std::string& text, const char* flag) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      v.push_back(std::stod(part));
    } catch (const std::exception&) {
      usage_error(std::string(flag) + " expects comma-separated numbers");
    }
  }
  if (v.size() != 3) usage_error(std::string(flag) + " expects three comma-separated numbers");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rerend: distill a radiance field into a mesh plus quantized embedding atlases, and render it"};
  app.require_subcommand(1);
  app.footer(std::string("Config keys (config file lines `key = value`, or --set key=value):\n") + rr_config_help() +
             "\nExit codes: 0 ok, 2 config error, 3 numeric failure, 4 I/O or format error.\n"
             "RRND_THREADS caps worker threads when --threads and the threads key are unset.");

  std::string config_path;
  std::vector<std::string> sets;
  int threads = -1;
  app.add_option("-c,--config", config_path, "config file");
  app.add_option("-s,--set", sets, "override a config key (key=value), repeatable");
  app.add_option("-t,--threads", threads, "worker threads (overrides the threads key)");

  std::string mesh_path, checkpoint_path, package_dir, out_path, history_path;

  auto* distill = app.add_subcommand("distill-mesh", "extract and condition the collision mesh");
  distill->add_option("-o,--out", out_path, "mesh OBJ [default: <out>/mesh.obj]");

  auto* train = app.add_subcommand("train", "render pseudo-images and train the factorized field");
  train->add_option("-m,--mesh", mesh_path, "mesh OBJ [default: <out>/mesh.obj]");
  train->add_option("-o,--checkpoint", checkpoint_path, "checkpoint [default: <out>/field.ckpt]");
  train->add_option("--history", history_path, "loss history JSON [default: <out>/history.json]");

  auto* bake = app.add_subcommand("bake", "bake and quantize the asset package");
  bake->add_option("-m,--mesh", mesh_path, "mesh OBJ [default: <out>/mesh.obj]");
  bake->add_option("-k,--checkpoint", checkpoint_path, "checkpoint [default: <out>/field.ckpt]");
  bake->add_option("-o,--package", package_dir, "package directory [default: <out>/package]");

  std::string eye = "0,0.5,3.5", target = "0,0,0", orbit, background, pfm_path;
  double fov = 40.0;
  int width = 256, height = 256;
  bool bilinear = false;
  auto* render = app.add_subcommand("render", "render a package view");
  render->add_option("-p,--package", package_dir, "package directory [default: <out>/package]");
  render->add_option("--eye", eye, "camera position x,y,z")->capture_default_str();
  render->add_option("--target", target, "look-at point x,y,z")->capture_default_str();
  render->add_option("--orbit", orbit, "elevation_deg,azimuth_deg,radius around the target (replaces --eye)");
  render->add_option("--fov", fov, "horizontal field of view in degrees")->capture_default_str();
  render->add_option("--width", width, "image width")->capture_default_str();
  render->add_option("--height", height, "image height")->capture_default_str();
  render->add_flag("--bilinear", bilinear, "bilinear direction-map fetch");
  render->add_option("--background", background, "background r,g,b (default: manifest)");
  render->add_option("-o,--out", out_path, "PNG output")->required();
  render->add_option("--pfm", pfm_path, "also write lossless float PFM");

  auto* eval = app.add_subcommand("eval", "metrics on the evaluation cameras");
  eval->add_option("-p,--package", package_dir, "package directory [default: <out>/package]");
  eval->add_option("-k,--checkpoint", checkpoint_path, "checkpoint for the unbaked reference (optional)");
  eval->add_option("-o,--out", out_path, "report JSON [default: stdout]");

  std::string axis, values;
  auto* sweep = app.add_subcommand("sweep", "re-bake (texels) or retrain (dim) across values");
  sweep->add_option("-a,--axis", axis, "texels or dim")->required();
  sweep->add_option("-v,--values", values, "comma-separated values, e.g. 3,4,5,6,8,12")->required();
  sweep->add_option("-m,--mesh", mesh_path, "mesh OBJ [default: <out>/mesh.obj]");
  sweep->add_option("-k,--checkpoint", checkpoint_path, "checkpoint for the texel sweep [default: <out>/field.ckpt]");
  sweep->add_option("-o,--out", out_path, "CSV [default: stdout]");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "serve a directory over HTTP with CORS for the viewer");
  serve->add_option("-r,--root", package_dir, "directory to serve [default: <out>]");
  serve->add_option("--host", host, "bind address")->capture_default_str();
  serve->add_option("--port", port, "port (0 picks a free one)")->capture_default_str();

  app.add_subcommand("print-config", "print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Config cfg;
    if (!config_path.empty()) check(rr_config_load(cfg.cfg, config_path.c_str()));
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) usage_error("--set expects key=value, got '" + kv + "'");
      check(rr_config_set(cfg.cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    if (threads >= 0) check(rr_config_set(cfg.cfg, "threads", std::to_string(threads).c_str()));
    check(rr_config_validate(cfg.cfg));
    check(rr_set_threads(std::stoi(cfg.get("threads"))));
    const fs::path out = cfg.get("out");
    auto or_default = [&out](const std::string& given, const char* name) {
      return given.empty() ? (out / name).string() : given;
    };

    if (*distill) {
      const std::string path = or_default(out_path, "mesh.obj");
      ensure_parent(path);
      OwnedString report;
      check(rr_distill_mesh(cfg.cfg, path.c_str(), &report.s));
      std::cout << report.str();
    } else if (*train) {
      const std::string ckpt = or_default(checkpoint_path, "field.ckpt");
      ensure_parent(ckpt);
      OwnedString history;
      check(rr_train(cfg.cfg, or_default(mesh_path, "mesh.obj").c_str(), ckpt.c_str(), &history.s));
      write_text(or_default(history_path, "history.json"), history.str());
    } else if (*bake) {
      check(rr_bake(cfg.cfg, or_default(mesh_path, "mesh.obj").c_str(), or_default(checkpoint_path, "field.ckpt").c_str(),
                    or_default(package_dir, "package").c_str()));
    } else if (*render) {
      rr_package* pkg = nullptr;
      check(rr_package_open(or_default(package_dir, "package").c_str(), &pkg));
      std::unique_ptr<rr_package, void (*)(rr_package*)> pkg_guard(pkg, rr_package_free);
      rr_camera cam{};
      const auto t = triple(target, "--target");
      std::copy(t.begin(), t.end(), cam.target);
      if (!orbit.empty()) {
        const auto o = triple(orbit, "--orbit");
        const double el = o[0] * 3.14159265358979323846 / 180.0;
        const double az = o[1] * 3.14159265358979323846 / 180.0;
        cam.eye[0] = t[0] + o[2] * std::cos(el) * std::cos(az);
        cam.eye[1] = t[1] + o[2] * std::sin(el);
        cam.eye[2] = t[2] + o[2] * std::cos(el) * std::sin(az);
      } else {
        const auto e = triple(eye, "--eye");
        std::copy(e.begin(), e.end(), cam.eye);
      }
      cam.fov_degrees = fov;
      cam.width = width;
      cam.height = height;
      rr_render_options opts{};
      opts.bilinear_directions = bilinear ? 1 : 0;
      if (!background.empty()) {
        const auto b = triple(background, "--background");
        opts.use_background = 1;
        std::copy(b.begin(), b.end(), opts.background);
      }
      rr_image* img = nullptr;
      check(rr_render(pkg, &cam, &opts, &img));
      std::unique_ptr<rr_image, void (*)(rr_image*)> img_guard(img, rr_image_free);
      ensure_parent(out_path);
      check(rr_image_write_png(img, out_path.c_str()));
      if (!pfm_path.empty()) check(rr_image_write_pfm(img, pfm_path.c_str()));
    } else if (*eval) {
      OwnedString report;
      check(rr_eval(cfg.cfg, or_default(package_dir, "package").c_str(),
                    checkpoint_path.empty() ? nullptr : checkpoint_path.c_str(), &report.s));
      if (out_path.empty()) std::cout << report.str();
      else write_text(out_path, report.str());
    } else if (*sweep) {
      OwnedString csv;
      check(rr_sweep(cfg.cfg, axis.c_str(), values.c_str(), or_default(mesh_path, "mesh.obj").c_str(),
                     or_default(checkpoint_path, "field.ckpt").c_str(), &csv.s));
      if (out_path.empty()) std::cout << csv.str();
      else write_text(out_path, csv.str());
    } else if (*serve) {
      rr_server* server = nullptr;
      const std::string root = package_dir.empty() ? out.string() : package_dir;
      check(rr_serve_start(root.c_str(), host.c_str(), port, &server));
      std::unique_ptr<rr_server, void (*)(rr_server*)> guard(server, rr_server_free);
      std::printf("serving %s at http://%s:%d/ (CORS enabled)\n", root.c_str(), host.c_str(), rr_server_port(server));
      std::fflush(stdout);
      check(rr_server_wait(server));
    } else {
      OwnedString text;
      check(rr_config_dump(cfg.cfg, &text.s));
      std::cout << text.str();
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s: %s\n", rr_status_name(f.status), rr_last_error());
    return rr_exit_code(f.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: io: %s\n", e.what());
    return 4;
  }
  return 0;
}
