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

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "baking/package.hpp"
#include "geometry/mesh.hpp"
#include "pipeline/config.hpp"
#include "render/eval.hpp"
#include "scene/radiance_field.hpp"

namespace rerend {

// Stage seeds: derive_seed(cfg.seed, label) with the labels
//   "cameras/train", "cameras/eval", "oracle/jitter", "field/init" and
//   "train" (the training loop further derives "train/batches").

std::unique_ptr<RadianceField> make_scene(const PipelineConfig& cfg);

std::vector<Camera> training_cameras(const PipelineConfig& cfg);
std::vector<Camera> evaluation_cameras(const PipelineConfig& cfg);

struct DistillResult {
  TriMesh mesh;
  MeshReport report;
  bool decimation_stalled = false;
};

/// Density lattice, marching cubes, component removal, decimation and
/// (for unbounded scenes) the enclosing dome.
DistillResult distill_mesh(const PipelineConfig& cfg);
std::string mesh_report_json(const DistillResult& result);

PseudoImageSet make_pseudo_images(const PipelineConfig& cfg);

/// Training settings with the stage seed and the scene background applied.
TrainConfig train_config(const PipelineConfig& cfg);

FactorizedField initial_field(const PipelineConfig& cfg);

TrainResult train_field(const PipelineConfig& cfg, const TriMesh& mesh, const PseudoImageSet& pseudo);
std::string history_json(const std::vector<HistoryEntry>& history);

/// Factorized or RGB-baseline package, following cfg.baseline.
AssetPackage bake(const PipelineConfig& cfg, const FactorizedField& field, const TriMesh& mesh);

RenderConfig render_config(const PipelineConfig& cfg);

/// Metrics of a package on the evaluation cameras against the scene oracle
/// and, when given, the unbaked field.
EvalReport evaluate(const PipelineConfig& cfg, const AssetPackage& pkg, const FactorizedField* field);

struct SweepRow {
  double value = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  std::uintmax_t package_bytes = 0;
};

enum class SweepAxis { kTexels, kDim };
SweepAxis parse_sweep_axis(const std::string& axis);

/// Texel sweep: re-bakes `field` at each p. Dim sweep: retrains a field
/// for each D (the given field is ignored). Packages are written under
/// cfg.out / "sweep" and their on-disk size is reported.
std::vector<SweepRow> sweep(const PipelineConfig& cfg, SweepAxis axis, const std::vector<int>& values,
                            const TriMesh& mesh, const FactorizedField* field, const PseudoImageSet* pseudo = nullptr);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace rerend
