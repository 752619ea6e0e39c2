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

#include "render/eval.hpp"

#include <cmath>
#include <json.hpp>

#include "common/parallel.hpp"

namespace rerend {

ImageBuffer render_oracle(const RadianceField& field, const Camera& camera, const PseudoImageOptions& options) {
  const Intrinsics& in = camera.intrinsics;
  ImageBuffer image(in.width, in.height);
  parallel_chunks(static_cast<std::size_t>(in.height), 4, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t y = begin; y < end; ++y) {
      for (int x = 0; x < in.width; ++x) {
        const std::uint64_t index = y * static_cast<std::uint64_t>(in.width) + static_cast<std::uint64_t>(x);
        image.set(x, static_cast<int>(y), oracle_ray_color(field, camera.pixel_ray(x, static_cast<int>(y)), options, index));
      }
    }
  });
  return image;
}

double EvalReport::mean_psnr(const std::vector<MetricRow>& rows) {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const MetricRow& r : rows) sum += r.psnr;
  return sum / static_cast<double>(rows.size());
}

double EvalReport::mean_ssim(const std::vector<MetricRow>& rows) {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const MetricRow& r : rows) sum += r.ssim;
  return sum / static_cast<double>(rows.size());
}

EvalReport eval_package(const AssetPackage& pkg, const FactorizedField* field, const RadianceField* oracle,
                        std::span<const Camera> cameras, const RenderConfig& cfg,
                        const PseudoImageOptions& oracle_options) {
  const PackageRenderer renderer(pkg);
  const Rgb background = cfg.background.value_or(pkg.background);
  PseudoImageOptions opts = oracle_options;
  opts.background = background;
  EvalReport report;
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    const ImageBuffer img = renderer.render(cameras[i], cfg);
    const int id = static_cast<int>(i);
    if (oracle != nullptr) {
      const ImageBuffer ref = render_oracle(*oracle, cameras[i], opts);
      report.vs_oracle.push_back({id, psnr(img, ref), ssim(img, ref)});
    }
    if (field != nullptr) {
      const ImageBuffer ref = render_float(*field, renderer.bvh(), cameras[i], background);
      report.vs_float.push_back({id, psnr(img, ref), ssim(img, ref)});
    }
  }
  return report;
}

namespace {

nlohmann::json psnr_value(double db) {
  if (std::isinf(db)) return "inf";
  return db;
}

nlohmann::json rows_json(const std::vector<MetricRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const MetricRow& r : rows) out.push_back({{"camera_id", r.camera_id}, {"psnr", psnr_value(r.psnr)}, {"ssim", r.ssim}});
  return out;
}

}  // namespace

std::string report_json(const EvalReport& report) {
  nlohmann::json j;
  j["vs_oracle"] = rows_json(report.vs_oracle);
  j["vs_float"] = rows_json(report.vs_float);
  nlohmann::json mean = nlohmann::json::object();
  if (!report.vs_oracle.empty()) {
    mean["vs_oracle"] = {{"psnr", psnr_value(EvalReport::mean_psnr(report.vs_oracle))},
                         {"ssim", EvalReport::mean_ssim(report.vs_oracle)}};
  }
  if (!report.vs_float.empty()) {
    mean["vs_float"] = {{"psnr", psnr_value(EvalReport::mean_psnr(report.vs_float))},
                        {"ssim", EvalReport::mean_ssim(report.vs_float)}};
  }
  j["mean"] = mean;
  return j.dump(2) + "\n";
}

}  // namespace rerend
