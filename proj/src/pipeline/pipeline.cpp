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

#include "pipeline/pipeline.hpp"

#include <cmath>
#include <json.hpp>
#include <sstream>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace rerend {

std::unique_ptr<RadianceField> make_scene(const PipelineConfig& cfg) {
  if (cfg.scene == SceneKind::kBoxGrid) {
    const double h = 0.6 * cfg.sphere_radius;
    return std::make_unique<BoxGrid>(Aabb{Vec3::Constant(-h), Vec3::Constant(h)}, 50.0, 0.3 * cfg.sphere_radius,
                                     Rgb(0.9, 0.4, 0.1), Rgb(0.1, 0.3, 0.8));
  }
  SphereMaterial material;
  material.specular = cfg.specular;
  material.shininess = cfg.shininess;
  return std::make_unique<TexturedSphere>(Vec3::Zero(), cfg.sphere_radius, material);
}

namespace {

std::vector<Camera> cameras(const PipelineConfig& cfg, int n, int w, int h, const char* label) {
  return sample_camera_poses(n, BoundingSphere{Vec3::Zero(), cfg.camera_radius}, derive_seed(cfg.seed, label),
                             Intrinsics::from_fov(w, h, cfg.fov));
}

PseudoImageOptions oracle_options(const PipelineConfig& cfg) {
  PseudoImageOptions o;
  o.mode = cfg.oracle_mode;
  o.background = cfg.background;
  o.volume_samples = cfg.volume_samples;
  o.seed = derive_seed(cfg.seed, "oracle/jitter");
  return o;
}

}  // namespace

std::vector<Camera> training_cameras(const PipelineConfig& cfg) {
  return cameras(cfg, cfg.train_cameras, cfg.train_width, cfg.train_height, "cameras/train");
}

std::vector<Camera> evaluation_cameras(const PipelineConfig& cfg) {
  return cameras(cfg, cfg.eval_cameras, cfg.eval_width, cfg.eval_height, "cameras/eval");
}

DistillResult distill_mesh(const PipelineConfig& cfg) {
  cfg.validate();
  const auto scene = make_scene(cfg);
  const Aabb b = scene->bounds();
  const Vec3 pad = 0.05 * (b.hi - b.lo);
  const DensityGrid grid = sample_density_grid(*scene, cfg.grid_k, Aabb{Vec3(b.lo - pad), Vec3(b.hi + pad)});
  TriMesh mesh = marching_cubes(grid, cfg.iso < 0 ? default_iso(grid) : cfg.iso);
  if (mesh.empty()) fail(ErrorKind::kNumeric, "marching cubes produced no surface; check iso and grid_k");
  mesh = remove_small_components(mesh, cfg.min_component_fraction);
  DistillResult out;
  if (cfg.decimate_target > 0 && mesh.faces.size() > cfg.decimate_target) {
    DecimationResult d = decimate(mesh, cfg.decimate_target);
    mesh = std::move(d.mesh);
    out.decimation_stalled = d.stalled;
  }
  if (cfg.unbounded) mesh = enclose_dome(mesh, cfg.dome_radius, cfg.dome_floor, cfg.dome_subdivisions);
  out.report = validate_mesh(mesh);
  out.mesh = std::move(mesh);
  return out;
}

std::string mesh_report_json(const DistillResult& result) {
  const MeshReport& r = result.report;
  nlohmann::json j = {{"vertices", r.vertices},
                      {"faces", r.faces},
                      {"boundary_edges", r.boundary_edges},
                      {"non_manifold_edges", r.non_manifold_edges},
                      {"degenerate_faces", r.degenerate_faces},
                      {"components", r.components},
                      {"decimation_stalled", result.decimation_stalled}};
  return j.dump(2) + "\n";
}

PseudoImageSet make_pseudo_images(const PipelineConfig& cfg) {
  cfg.validate();
  const auto scene = make_scene(cfg);
  return generate_pseudo_images(*scene, training_cameras(cfg), oracle_options(cfg));
}

TrainConfig train_config(const PipelineConfig& cfg) {
  TrainConfig t = cfg.train;
  t.seed = derive_seed(cfg.seed, "train");
  t.loss.background = cfg.background;
  return t;
}

FactorizedField initial_field(const PipelineConfig& cfg) { return init_field(cfg.arch, derive_seed(cfg.seed, "field/init")); }

TrainResult train_field(const PipelineConfig& cfg, const TriMesh& mesh, const PseudoImageSet& pseudo) {
  cfg.validate();
  const Bvh bvh(mesh);
  return train(initial_field(cfg), pseudo, bvh, train_config(cfg));
}

std::string history_json(const std::vector<HistoryEntry>& history) {
  nlohmann::json j = nlohmann::json::array();
  for (const HistoryEntry& e : history) j.push_back({{"step", e.step}, {"loss", e.loss}});
  return j.dump(2) + "\n";
}

AssetPackage bake(const PipelineConfig& cfg, const FactorizedField& field, const TriMesh& mesh) {
  cfg.validate();
  if (field.dim % 4 != 0) fail(ErrorKind::kDimension, "baking needs D divisible by 4");
  if (cfg.baseline == BaselineMode::kRgbNormal) return bake_rgb_baseline(field, mesh, cfg.p, cfg.background);
  return bake_package(field, mesh, cfg.p, cfg.grid, cfg.background);
}

RenderConfig render_config(const PipelineConfig& cfg) {
  RenderConfig r;
  r.background = cfg.background;
  r.direction_fetch = cfg.direction_fetch;
  r.baseline = cfg.baseline;
  return r;
}

EvalReport evaluate(const PipelineConfig& cfg, const AssetPackage& pkg, const FactorizedField* field) {
  const auto scene = make_scene(cfg);
  RenderConfig rc = render_config(cfg);
  rc.baseline = pkg.factorized() ? BaselineMode::kOff : BaselineMode::kRgbNormal;
  const auto cams = evaluation_cameras(cfg);
  return eval_package(pkg, field, scene.get(), cams, rc, oracle_options(cfg));
}

SweepAxis parse_sweep_axis(const std::string& axis) {
  if (axis == "texels" || axis == "p") return SweepAxis::kTexels;
  if (axis == "dim" || axis == "D") return SweepAxis::kDim;
  fail(ErrorKind::kConfig, "unknown sweep axis '" + axis + "' (expected texels or dim)");
}

std::vector<SweepRow> sweep(const PipelineConfig& cfg, SweepAxis axis, const std::vector<int>& values,
                            const TriMesh& mesh, const FactorizedField* field, const PseudoImageSet* pseudo) {
  if (values.empty()) fail(ErrorKind::kConfig, "sweep needs at least one value");
  if (axis == SweepAxis::kTexels && field == nullptr) fail(ErrorKind::kConfig, "texel sweep needs a trained field");
  std::optional<PseudoImageSet> own_pseudo;
  if (axis == SweepAxis::kDim && pseudo == nullptr) {
    own_pseudo = make_pseudo_images(cfg);
    pseudo = &*own_pseudo;
  }
  std::vector<SweepRow> rows;
  for (int v : values) {
    PipelineConfig c = cfg;
    c.baseline = BaselineMode::kOff;
    std::optional<FactorizedField> trained;
    if (axis == SweepAxis::kTexels) {
      c.p = v;
    } else {
      c.arch.dim = v;
      trained = train_field(c, mesh, *pseudo).field;
    }
    c.validate();
    const FactorizedField& f = trained ? *trained : *field;
    const AssetPackage pkg = bake(c, f, mesh);
    const auto dir = cfg.out / "sweep" / ((axis == SweepAxis::kTexels ? "p_" : "D_") + std::to_string(v));
    std::filesystem::remove_all(dir);
    write_asset_package(dir, pkg);
    const EvalReport report = evaluate(c, pkg, cfg.sweep_against_float ? &f : nullptr);
    const auto& metric = cfg.sweep_against_float ? report.vs_float : report.vs_oracle;
    rows.push_back({static_cast<double>(v), EvalReport::mean_psnr(metric), EvalReport::mean_ssim(metric),
                    package_disk_bytes(dir)});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "value,psnr,ssim,package_bytes\n";
  out.setf(std::ios::fixed);
  for (const SweepRow& r : rows) {
    out.precision(0);
    out << r.value << ",";
    out << format_psnr(r.psnr) << ",";
    out.precision(6);
    out << r.ssim << "," << r.package_bytes << "\n";
  }
  return out.str();
}

}  // namespace rerend
