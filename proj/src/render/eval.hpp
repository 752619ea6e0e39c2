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

#include <span>
#include <string>
#include <vector>

#include "render/render.hpp"
#include "scene/pseudo_images.hpp"
#include "scene/radiance_field.hpp"

namespace rerend {

/// Ground-truth view rendered by the scene oracle, one ray per pixel.
ImageBuffer render_oracle(const RadianceField& field, const Camera& camera, const PseudoImageOptions& options);

struct MetricRow {
  int camera_id = 0;
  double psnr = 0.0;  // may be +infinity
  double ssim = 0.0;
};

struct EvalReport {
  std::vector<MetricRow> vs_oracle;  // empty when no oracle was given
  std::vector<MetricRow> vs_float;   // empty when no field was given

  static double mean_psnr(const std::vector<MetricRow>& rows);
  static double mean_ssim(const std::vector<MetricRow>& rows);
};

/// Renders the package from every camera and compares it with the oracle
/// and/or the pre-discretization render of `field`. Either reference may
/// be null.
EvalReport eval_package(const AssetPackage& pkg, const FactorizedField* field, const RadianceField* oracle,
                        std::span<const Camera> cameras, const RenderConfig& cfg = {},
                        const PseudoImageOptions& oracle_options = {});

/// {"vs_oracle": [{camera_id, psnr, ssim}...], "vs_float": [...], "mean": {...}};
/// infinite PSNR is written as the string "inf".
std::string report_json(const EvalReport& report);

}  // namespace rerend
