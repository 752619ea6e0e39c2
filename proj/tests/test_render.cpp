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

#include <cmath>
#include <filesystem>
#include <json.hpp>

#include "baking/bake.hpp"
#include "baking/package.hpp"
#include "common/error.hpp"
#include "render/eval.hpp"
#include "render/image.hpp"
#include "render/render.hpp"

namespace rerend {
namespace {

namespace fs = std::filesystem;

ImageBuffer uniform(int w, int h, double v) { return ImageBuffer(w, h, Rgb::Constant(v)); }

TEST(Psnr, Examples) {
  EXPECT_TRUE(std::isinf(psnr(uniform(8, 8, 0.3), uniform(8, 8, 0.3))));
  EXPECT_EQ(format_psnr(psnr(uniform(8, 8, 0.3), uniform(8, 8, 0.3))), "inf");
  EXPECT_NEAR(psnr(uniform(8, 8, 0), uniform(8, 8, 1)), 0.0, 1e-12);
  EXPECT_NEAR(psnr(uniform(8, 8, 0), uniform(8, 8, 0.5)), 6.0206, 1e-4);
  EXPECT_THROW(psnr(uniform(8, 8, 0), uniform(8, 9, 0)), Error);
}

// Deterministic test pattern shared with the scikit-image reference script.
double hash(double i, double s) {
  const double v = std::sin(i * 12.9898 + s * 78.233) * 43758.5453;
  return v - std::floor(v);
}

std::pair<ImageBuffer, ImageBuffer> ssim_pair(int s) {
  constexpr int kW = 32, kH = 24;
  ImageBuffer a(kW, kH), b(kW, kH);
  for (int y = 0; y < kH; ++y) {
    for (int x = 0; x < kW; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double i = (y * kW + x) * 3 + c;
        const double va = 0.5 + 0.35 * std::sin(0.3 * x + 0.2 * y + c + s) + 0.1 * (hash(i, s) - 0.5);
        const double vb = std::clamp(va + 0.3 * (hash(i, s + 100) - 0.5), 0.0, 1.0);
        a.rgb[3 * (y * kW + x) + c] = static_cast<float>(va);
        b.rgb[3 * (y * kW + x) + c] = static_cast<float>(vb);
      }
    }
  }
  return {a, b};
}

TEST(Ssim, MatchesReferenceImplementation) {
  // skimage.metrics.structural_similarity(gaussian_weights=True, sigma=1.5,
  // use_sample_covariance=False, data_range=1) on the RGB-mean luminance.
  const double expected[5] = {0.8239963449586655, 0.848085772626669, 0.8287503335645412, 0.8503636772568008,
                              0.8421036124044844};
  for (int s = 1; s <= 5; ++s) {
    const auto [a, b] = ssim_pair(s);
    EXPECT_NEAR(ssim(a, b), expected[s - 1], 1e-4) << s;
  }
}

TEST(Ssim, IdentityNegativeAndErrors) {
  const auto [a, b] = ssim_pair(1);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
  ImageBuffer neg = a;
  for (float& v : neg.rgb) v = 1.0f - v;
  EXPECT_LT(ssim(a, neg), 0.2);
  EXPECT_THROW(ssim(uniform(10, 20, 0), uniform(10, 20, 0)), Error);
  EXPECT_THROW(ssim(a, uniform(32, 25, 0)), Error);
}

TEST(ImageIo, PfmIsLosslessAndPngRounds) {
  const auto [a, b] = ssim_pair(2);
  const fs::path dir = fs::temp_directory_path() / "rerend_test_render_io";
  fs::create_directories(dir);
  write_pfm(dir / "a.pfm", a);
  EXPECT_EQ(read_pfm(dir / "a.pfm").rgb, a.rgb);
  write_png_rgb8(dir / "b.png", b);
  const ImageBuffer back = read_png_rgb8(dir / "b.png");
  for (std::size_t i = 0; i < b.rgb.size(); ++i) ASSERT_LE(std::abs(back.rgb[i] - b.rgb[i]), 0.5 / 255 + 1e-6);
  fs::remove_all(dir);
}

FactorizedField small_field(int dim, std::uint64_t seed) {
  FieldArch arch;
  arch.dim = dim;
  arch.pos_depth = 2;
  arch.pos_width = 16;
  arch.dir_depth = 2;
  arch.dir_width = 16;
  return init_field(arch, seed);
}

Camera front_camera(int size = 32) {
  return Camera::look_at(Vec3(0, 0.4, 3), Vec3::Zero(), Intrinsics::from_fov(size, size, 50));
}

TEST(Render, ZeroFieldIsMidGray) {
  FactorizedField f = small_field(8, 1);
  f.pos.params().setZero();
  f.dir.params().setZero();
  const AssetPackage pkg = bake_package(f, make_icosphere(2), 3, DirectionGrid{8, 8}, Rgb(1, 1, 1));
  const PackageRenderer r(pkg);
  const ImageBuffer img = r.render(front_camera());
  int hits = 0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (r.trace(front_camera().pixel_ray(x, y))) {
        ++hits;
        EXPECT_EQ(img.at(x, y), Rgb::Constant(0.5));
      } else {
        EXPECT_EQ(img.at(x, y), Rgb::Ones());
      }
    }
  }
  EXPECT_GT(hits, 100);
}

TEST(Render, FacingAwayGivesBackgroundAndIsDeterministic) {
  const AssetPackage pkg = bake_package(small_field(8, 2), make_icosphere(2), 4, DirectionGrid{8, 8}, Rgb(0.2, 0.3, 0.4));
  const Camera away = Camera::look_at(Vec3(0, 0, 3), Vec3(0, 0, 6), Intrinsics::from_fov(16, 16, 40));
  const ImageBuffer bg = render(pkg, away);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) EXPECT_EQ(bg.at(x, y), Rgb(0.2f, 0.3f, 0.4f).cast<double>());
  }
  RenderConfig cfg;
  cfg.background = Rgb(0, 0, 0);
  EXPECT_EQ(render(pkg, away, cfg).at(3, 3), Rgb::Zero());
  EXPECT_EQ(render(pkg, front_camera()).rgb, render(pkg, front_camera()).rgb);
  cfg.direction_fetch = DirectionFetch::kBilinear;
  EXPECT_EQ(render(pkg, front_camera(), cfg).rgb, render(pkg, front_camera(), cfg).rgb);
}

TEST(Render, BaselineModeMustMatchVariant) {
  const AssetPackage pkg = bake_package(small_field(4, 3), make_icosphere(1), 2, DirectionGrid{4, 4}, Rgb::Ones());
  RenderConfig cfg;
  cfg.baseline = BaselineMode::kRgbNormal;
  EXPECT_THROW(render(pkg, front_camera(), cfg), Error);
}

TEST(Render, BilinearAgreesWithNearestAtGridNodes) {
  const AssetPackage pkg = bake_package(small_field(8, 4), make_icosphere(2), 3, DirectionGrid{9, 16}, Rgb::Ones());
  const PackageRenderer r(pkg);
  RenderConfig bilinear;
  bilinear.direction_fetch = DirectionFetch::kBilinear;
  // A ray from outside pointing at the sphere along grid direction (3, 5).
  const Vec3 d = pkg.grid.direction(3, 5);
  const Ray ray{-3.0 * d + Vec3(0.01, 0.02, 0.0), d};
  const auto a = r.trace(ray);
  const auto b = r.trace(ray, bilinear);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->dir_elev, 3);
  EXPECT_EQ(a->dir_azim, 5);
  EXPECT_LT((a->color - b->color).norm(), 1e-12);
}

TEST(RenderFloat, MissOnlyViewIsBackground) {
  const Bvh bvh(make_icosphere(1));
  const Camera away = Camera::look_at(Vec3(0, 0, 3), Vec3(0, 0, 6), Intrinsics::from_fov(12, 12, 40));
  const ImageBuffer img = render_float(small_field(4, 5), bvh, away, Rgb(0.1, 0.2, 0.3));
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 12; ++x) EXPECT_EQ(img.at(x, y), Rgb(0.1f, 0.2f, 0.3f).cast<double>());
  }
}

// Every hit pixel of the u8 render stays within the propagated half-step
// error of the render from the same atlases before quantization.
TEST(Render, QuantizationErrorBound) {
  const FactorizedField f = small_field(8, 6);
  const TriMesh mesh = make_icosphere(2);
  const AssetPackage pkg = bake_package(f, mesh, 4, DirectionGrid{8, 16}, Rgb::Ones());
  std::vector<FloatAtlas> floats;
  for (const FloatAtlas& a : bake_position_atlases(f, mesh, pkg.layout)) floats.push_back(a);
  floats.push_back(bake_direction_map(f, pkg.grid));
  const PackageRenderer quantized(pkg);
  const PackageRenderer exact(pkg, floats);
  const Camera cam = front_camera(48);
  double worst_ratio = 0.0;
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 48; ++x) {
      const Ray ray = cam.pixel_ray(x, y);
      const auto q = quantized.trace(ray);
      const auto e = exact.trace(ray);
      ASSERT_EQ(q.has_value(), e.has_value());
      if (!q) continue;
      const auto& beta_range = pkg.atlases[3].quant.range;
      for (int ch = 0; ch < 3; ++ch) {
        const auto& u_range = pkg.atlases[static_cast<std::size_t>(ch)].quant.range;
        double bound = 0.0;
        for (int k = 0; k < 8; ++k) {
          const double hu = (static_cast<double>(u_range[k].second) - u_range[k].first) / 510.0;
          const double hb = (static_cast<double>(beta_range[k].second) - beta_range[k].first) / 510.0;
          const double beta = quantized.value(3, k, q->dir_azim, q->dir_elev);
          const double u = quantized.value(static_cast<std::size_t>(ch), k, q->texel.x, q->texel.y);
          bound += hu * std::abs(beta) + std::abs(u) * hb + hu * hb;
        }
        const double diff = std::abs(q->color[ch] - e->color[ch]);
        ASSERT_LE(diff, 0.25 * bound + 1e-12);
        worst_ratio = std::max(worst_ratio, diff / (0.25 * bound));
      }
    }
  }
  EXPECT_GT(worst_ratio, 0.0);
}

TEST(Baseline, ViewIndependentFieldMatchesFullRender) {
  FactorizedField f = small_field(8, 7);
  // Constant direction network: zero weights, fixed output bias.
  f.dir.params().setZero();
  const int last = f.dir.shape().layer_count() - 1;
  for (int k = 0; k < 8; ++k) f.dir.params()[f.dir.bias_offset(last) + k] = 0.3 * (k % 3) - 0.2;
  const TriMesh mesh = make_icosphere(2);
  const AssetPackage full = bake_package(f, mesh, 4, DirectionGrid{8, 16}, Rgb::Ones());
  const AssetPackage base = bake_rgb_baseline(f, mesh, 4, Rgb::Ones());
  RenderConfig cfg;
  cfg.baseline = BaselineMode::kRgbNormal;
  const ImageBuffer a = render(full, front_camera());
  const ImageBuffer b = render(base, front_camera(), cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rgb.size(); ++i) worst = std::max(worst, static_cast<double>(std::abs(a.rgb[i] - b.rgb[i])));
  EXPECT_LT(worst, 0.02);
}

TEST(Eval, SelfComparisonAndRowCount) {
  const FactorizedField f = small_field(8, 8);
  const AssetPackage pkg = bake_package(f, make_icosphere(2), 4, DirectionGrid{8, 8}, Rgb::Ones());
  std::vector<Camera> cams = {front_camera(16), Camera::look_at(Vec3(3, 0, 0), Vec3::Zero(), Intrinsics::from_fov(16, 16, 50))};
  const EvalReport report = eval_package(pkg, &f, nullptr, cams);
  EXPECT_EQ(report.vs_float.size(), 2u);
  EXPECT_TRUE(report.vs_oracle.empty());
  const ImageBuffer img = render(pkg, cams[0]);
  EXPECT_TRUE(std::isinf(psnr(img, img)));
  EXPECT_NEAR(ssim(img, img), 1.0, 1e-12);
  EvalReport self;
  self.vs_oracle.push_back({0, psnr(img, img), ssim(img, img)});
  const auto j = nlohmann::json::parse(report_json(self));
  EXPECT_EQ(j["vs_oracle"][0]["psnr"], "inf");
  EXPECT_EQ(j["vs_oracle"][0]["camera_id"], 0);
}

}  // namespace
}  // namespace rerend
