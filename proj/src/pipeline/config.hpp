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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "baking/bake.hpp"
#include "field/field.hpp"
#include "field/train.hpp"
#include "render/render.hpp"
#include "scene/pseudo_images.hpp"

namespace rerend {

enum class SceneKind { kSphere, kBoxGrid };

/// Every tunable of the pipeline. Text form: one `key = value` per line,
/// `#` starts a comment; see config_help() for the keys.
struct PipelineConfig {
  // Scene oracle.
  SceneKind scene = SceneKind::kSphere;
  double sphere_radius = 1.0;
  double specular = 0.45;
  double shininess = 12.0;
  RenderMode oracle_mode = RenderMode::kSurface;
  int volume_samples = 256;

  // Mesh distillation.
  int grid_k = 64;
  double iso = -1.0;  // < 0: default_iso
  double min_component_fraction = 0.05;
  std::size_t decimate_target = 5000;  // 0 keeps every face
  bool unbounded = false;
  double dome_radius = 3.0;
  double dome_floor = -1.5;
  int dome_subdivisions = 4;

  // Cameras.
  int train_cameras = 100;
  int train_width = 64;
  int train_height = 64;
  int eval_cameras = 8;
  int eval_width = 96;
  int eval_height = 96;
  double fov = 40.0;
  double camera_radius = 3.5;

  // Field and training.
  FieldArch arch;
  TrainConfig train;

  // Baking and rendering.
  int p = 6;
  DirectionGrid grid;
  Rgb background = Rgb::Ones();
  DirectionFetch direction_fetch = DirectionFetch::kNearest;
  BaselineMode baseline = BaselineMode::kOff;
  bool sweep_against_float = false;

  std::filesystem::path out = "out";
  std::uint64_t seed = 0;
  int threads = 0;  // 0: RRND_THREADS or hardware concurrency

  /// Re-checks every module invariant; raises kConfig naming the key.
  void validate() const;
};

/// Applies one key; kConfig on an unknown key or unparsable value.
void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value);

/// Current value of a key in its text form.
std::string get_config_value(const PipelineConfig& cfg, const std::string& key);

/// Parses a config file's text on top of `base`.
PipelineConfig parse_config(const std::string& text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Full config text (every key with its current value).
std::string dump_config(const PipelineConfig& cfg);

/// One line per key: name, default and description.
std::string config_help();

std::vector<std::string> config_keys();

}  // namespace rerend
