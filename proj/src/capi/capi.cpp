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

#include "rerend/rerend.h"

#include <cstring>
#include <sstream>
#include <string>

#include "baking/package.hpp"
#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "common/parallel.hpp"
#include "field/field.hpp"
#include "pipeline/config.hpp"
#include "pipeline/pipeline.hpp"
#include "pipeline/serve.hpp"
#include "render/render.hpp"

struct rr_config {
  rerend::PipelineConfig cfg;
};

struct rr_package {
  rerend::AssetPackage pkg;
  std::unique_ptr<rerend::PackageRenderer> renderer;
};

struct rr_image {
  rerend::ImageBuffer image;
};

struct rr_server {
  rerend::StaticServer server;
};

namespace {

using rerend::Error;
using rerend::ErrorKind;

thread_local std::string g_last_error;

rr_status to_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return RR_ERR_INVALID_ARGUMENT;
    case ErrorKind::kConfig: return RR_ERR_CONFIG;
    case ErrorKind::kNumeric: return RR_ERR_NUMERIC;
    case ErrorKind::kIo: return RR_ERR_IO;
    case ErrorKind::kMissingFile: return RR_ERR_MISSING_FILE;
    case ErrorKind::kDecode: return RR_ERR_DECODE;
    case ErrorKind::kDimension: return RR_ERR_DIMENSION;
    case ErrorKind::kVersion: return RR_ERR_VERSION;
  }
  return RR_ERR_INTERNAL;
}

template <typename Fn>
rr_status guarded(Fn&& fn) {
  try {
    fn();
    return RR_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RR_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) rerend::fail(ErrorKind::kInvalidArgument, std::string(what) + " must not be NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void give(char** out, const std::string& s) {
  if (out != nullptr) *out = copy_string(s);
}

std::vector<int> parse_values(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      rerend::fail(ErrorKind::kConfig, "sweep values must be comma-separated integers, got '" + part + "'");
    }
  }
  return out;
}

}  // namespace

extern "C" {

const char* rr_version(void) { return "1.0.0"; }

const char* rr_last_error(void) { return g_last_error.c_str(); }

const char* rr_status_name(rr_status status) {
  switch (status) {
    case RR_OK: return "ok";
    case RR_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case RR_ERR_CONFIG: return "config";
    case RR_ERR_NUMERIC: return "numeric";
    case RR_ERR_IO: return "io";
    case RR_ERR_MISSING_FILE: return "missing_file";
    case RR_ERR_DECODE: return "decode";
    case RR_ERR_DIMENSION: return "dimension";
    case RR_ERR_VERSION: return "version";
    case RR_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

int rr_exit_code(rr_status status) {
  switch (status) {
    case RR_OK: return 0;
    case RR_ERR_INVALID_ARGUMENT:
    case RR_ERR_CONFIG: return 2;
    case RR_ERR_NUMERIC: return 3;
    default: return 4;
  }
}

rr_status rr_set_threads(int threads) {
  return guarded([&] {
    rerend::require(threads >= 0, "thread count must be >= 0");
    rerend::set_thread_limit(threads);
  });
}

rr_status rr_config_new(rr_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new rr_config{};
  });
}

rr_status rr_config_load(rr_config* cfg, const char* path) {
  return guarded([&] {
    need(cfg, "cfg");
    need(path, "path");
    cfg->cfg = rerend::load_config(path);
  });
}

rr_status rr_config_set(rr_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(value, "value");
    rerend::set_config_value(cfg->cfg, key, value);
  });
}

rr_status rr_config_get(const rr_config* cfg, const char* key, char** value) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(value, "value");
    *value = copy_string(rerend::get_config_value(cfg->cfg, key));
  });
}

rr_status rr_config_dump(const rr_config* cfg, char** text) {
  return guarded([&] {
    need(cfg, "cfg");
    need(text, "text");
    *text = copy_string(rerend::dump_config(cfg->cfg));
  });
}

rr_status rr_config_validate(const rr_config* cfg) {
  return guarded([&] {
    need(cfg, "cfg");
    cfg->cfg.validate();
  });
}

const char* rr_config_help(void) {
  static const std::string help = rerend::config_help();
  return help.c_str();
}

void rr_config_free(rr_config* cfg) { delete cfg; }

rr_status rr_distill_mesh(const rr_config* cfg, const char* out_obj, char** report) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out_obj, "out_obj");
    const rerend::DistillResult r = rerend::distill_mesh(cfg->cfg);
    rerend::write_obj(out_obj, r.mesh);
    give(report, rerend::mesh_report_json(r));
  });
}

rr_status rr_train(const rr_config* cfg, const char* mesh_obj, const char* out_checkpoint, char** history) {
  return guarded([&] {
    need(cfg, "cfg");
    need(mesh_obj, "mesh_obj");
    need(out_checkpoint, "out_checkpoint");
    const rerend::TriMesh mesh = rerend::read_obj(mesh_obj);
    const rerend::PseudoImageSet pseudo = rerend::make_pseudo_images(cfg->cfg);
    const rerend::TrainResult r = rerend::train_field(cfg->cfg, mesh, pseudo);
    rerend::write_checkpoint(out_checkpoint, r.field);
    give(history, rerend::history_json(r.history));
  });
}

rr_status rr_bake(const rr_config* cfg, const char* mesh_obj, const char* checkpoint, const char* out_dir) {
  return guarded([&] {
    need(cfg, "cfg");
    need(mesh_obj, "mesh_obj");
    need(checkpoint, "checkpoint");
    need(out_dir, "out_dir");
    const rerend::TriMesh mesh = rerend::read_obj(mesh_obj);
    const rerend::FactorizedField field = rerend::read_checkpoint(checkpoint);
    if (field.dim != cfg->cfg.arch.dim) {
      rerend::fail(ErrorKind::kDimension, "checkpoint has D = " + std::to_string(field.dim) + " but the config says " +
                                              std::to_string(cfg->cfg.arch.dim));
    }
    rerend::write_asset_package(out_dir, rerend::bake(cfg->cfg, field, mesh));
  });
}

rr_status rr_eval(const rr_config* cfg, const char* package_dir, const char* checkpoint, char** report) {
  return guarded([&] {
    need(cfg, "cfg");
    need(package_dir, "package_dir");
    need(report, "report");
    const rerend::AssetPackage pkg = rerend::read_asset_package(package_dir);
    std::optional<rerend::FactorizedField> field;
    if (checkpoint != nullptr) field = rerend::read_checkpoint(checkpoint);
    *report = copy_string(rerend::report_json(rerend::evaluate(cfg->cfg, pkg, field ? &*field : nullptr)));
  });
}

rr_status rr_sweep(const rr_config* cfg, const char* axis, const char* values, const char* mesh_obj,
                   const char* checkpoint, char** csv) {
  return guarded([&] {
    need(cfg, "cfg");
    need(axis, "axis");
    need(values, "values");
    need(mesh_obj, "mesh_obj");
    need(csv, "csv");
    const rerend::SweepAxis a = rerend::parse_sweep_axis(axis);
    const rerend::TriMesh mesh = rerend::read_obj(mesh_obj);
    std::optional<rerend::FactorizedField> field;
    if (a == rerend::SweepAxis::kTexels) {
      need(checkpoint, "checkpoint");
      field = rerend::read_checkpoint(checkpoint);
    }
    const auto rows = rerend::sweep(cfg->cfg, a, parse_values(values), mesh, field ? &*field : nullptr);
    *csv = copy_string(rerend::sweep_csv(rows));
  });
}

rr_status rr_package_open(const char* dir, rr_package** out) {
  return guarded([&] {
    need(dir, "dir");
    need(out, "out");
    auto p = std::make_unique<rr_package>();
    p->pkg = rerend::read_asset_package(dir);
    p->renderer = std::make_unique<rerend::PackageRenderer>(p->pkg);
    *out = p.release();
  });
}

rr_status rr_package_info_get(const rr_package* pkg, rr_package_info* info) {
  return guarded([&] {
    need(pkg, "pkg");
    need(info, "info");
    const rerend::AssetPackage& p = pkg->pkg;
    *info = rr_package_info{p.dim,
                            p.layout.p,
                            p.layout.texels_per_face,
                            static_cast<uint64_t>(p.layout.n_faces),
                            p.layout.width,
                            p.layout.height,
                            p.grid.n_elev,
                            p.grid.n_azim,
                            p.factorized() ? 1 : 0};
  });
}

void rr_package_free(rr_package* pkg) { delete pkg; }

rr_status rr_render(const rr_package* pkg, const rr_camera* camera, const rr_render_options* options, rr_image** out) {
  return guarded([&] {
    need(pkg, "pkg");
    need(camera, "camera");
    need(out, "out");
    rerend::require(camera->width >= 1 && camera->height >= 1, "camera size must be at least 1x1");
    rerend::require(camera->fov_degrees > 0 && camera->fov_degrees < 180, "camera fov must be in (0, 180)");
    const rerend::Vec3 eye(camera->eye[0], camera->eye[1], camera->eye[2]);
    const rerend::Vec3 target(camera->target[0], camera->target[1], camera->target[2]);
    rerend::require((eye - target).norm() > 0, "camera eye and target must differ");
    const rerend::Camera cam = rerend::Camera::look_at(
        eye, target, rerend::Intrinsics::from_fov(camera->width, camera->height, camera->fov_degrees));
    rerend::RenderConfig rc;
    rc.baseline = pkg->pkg.factorized() ? rerend::BaselineMode::kOff : rerend::BaselineMode::kRgbNormal;
    if (options != nullptr) {
      rc.direction_fetch = options->bilinear_directions ? rerend::DirectionFetch::kBilinear
                                                        : rerend::DirectionFetch::kNearest;
      if (options->use_background) {
        rc.background = rerend::Rgb(options->background[0], options->background[1], options->background[2]);
      }
    }
    *out = new rr_image{pkg->renderer->render(cam, rc)};
  });
}

int rr_image_width(const rr_image* image) { return image ? image->image.width : 0; }
int rr_image_height(const rr_image* image) { return image ? image->image.height : 0; }
const float* rr_image_data(const rr_image* image) { return image ? image->image.rgb.data() : nullptr; }

rr_status rr_image_write_png(const rr_image* image, const char* path) {
  return guarded([&] {
    need(image, "image");
    need(path, "path");
    rerend::write_png_rgb8(path, image->image);
  });
}

rr_status rr_image_write_pfm(const rr_image* image, const char* path) {
  return guarded([&] {
    need(image, "image");
    need(path, "path");
    rerend::write_pfm(path, image->image);
  });
}

rr_status rr_image_psnr(const rr_image* a, const rr_image* b, double* db) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(db, "db");
    *db = rerend::psnr(a->image, b->image);
  });
}

rr_status rr_image_ssim(const rr_image* a, const rr_image* b, double* value) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(value, "value");
    *value = rerend::ssim(a->image, b->image);
  });
}

void rr_image_free(rr_image* image) { delete image; }

rr_status rr_serve_start(const char* root, const char* host, int port, rr_server** out) {
  return guarded([&] {
    need(root, "root");
    need(out, "out");
    auto s = std::make_unique<rr_server>();
    s->server.start(root, host != nullptr ? host : "127.0.0.1", port);
    *out = s.release();
  });
}

int rr_server_port(const rr_server* server) { return server ? server->server.port() : -1; }

rr_status rr_server_wait(rr_server* server) {
  return guarded([&] {
    need(server, "server");
    server->server.wait();
  });
}

void rr_server_stop(rr_server* server) {
  if (server != nullptr) server->server.stop();
}

void rr_server_free(rr_server* server) { delete server; }

void rr_string_free(char* s) { std::free(s); }

}  // extern "C"
