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

#include "render/render.hpp"

#include <cmath>

#include "common/error.hpp"
#include "common/parallel.hpp"

namespace rerend {

namespace {

constexpr std::size_t kRowChunk = 4;

}  // namespace

PackageRenderer::PackageRenderer(const AssetPackage& pkg) : pkg_(pkg), bvh_((pkg.validate(), pkg.mesh)) {
  for (const QuantizedAtlas& q : pkg_.atlases) {
    Table t{q.atlas.channels, q.atlas.width, q.atlas.height, {}};
    t.data.resize(q.atlas.data.size());
    for (int y = 0; y < t.height; ++y) {
      for (int x = 0; x < t.width; ++x) {
        double* out = t.data.data() + (static_cast<std::size_t>(y) * t.width + x) * t.channels;
        for (int c = 0; c < t.channels; ++c) out[c] = dequantize(q.atlas.at(c, x, y), q.quant.range[c]);
      }
    }
    tables_.push_back(std::move(t));
  }
}

PackageRenderer::PackageRenderer(const AssetPackage& pkg, std::span<const FloatAtlas> atlases)
    : pkg_(pkg), bvh_((pkg.validate(), pkg.mesh)) {
  if (atlases.size() != pkg_.atlases.size()) fail(ErrorKind::kDimension, "renderer: wrong number of float atlases");
  for (std::size_t k = 0; k < atlases.size(); ++k) {
    const FloatAtlas& a = atlases[k];
    const ByteAtlas& ref = pkg_.atlases[k].atlas;
    if (a.channels != ref.channels || a.width != ref.width || a.height != ref.height) {
      fail(ErrorKind::kDimension, "renderer: float atlas shape differs from the package");
    }
    Table t{a.channels, a.width, a.height, std::vector<double>(a.data.size())};
    for (int y = 0; y < t.height; ++y) {
      for (int x = 0; x < t.width; ++x) {
        for (int c = 0; c < t.channels; ++c) {
          t.data[(static_cast<std::size_t>(y) * t.width + x) * t.channels + c] = a.at(c, x, y);
        }
      }
    }
    tables_.push_back(std::move(t));
  }
}

double PackageRenderer::value(std::size_t k, int c, int x, int y) const { return tables_.at(k).pixel(x, y)[c]; }

void PackageRenderer::check(const RenderConfig& cfg) const {
  const bool baseline = cfg.baseline == BaselineMode::kRgbNormal;
  if (baseline == pkg_.factorized()) {
    fail(ErrorKind::kConfig, std::string("baseline mode ") + (baseline ? "rgb_normal" : "off") +
                                 " does not match the package variant " + pkg_.variant);
  }
}

std::array<int, 2> nearest_direction_cell(const DirectionGrid& grid, const Vec3& direction) {
  const Vec2 angles = angles_from_direction(direction);
  const double elev_step = kPi / (grid.n_elev - 1);
  const double azim_step = 2.0 * kPi / grid.n_azim;
  const int i = std::clamp(static_cast<int>(std::lround(angles.x() / elev_step)), 0, grid.n_elev - 1);
  const int j = static_cast<int>(std::lround(angles.y() / azim_step)) % grid.n_azim;
  return {i, j};
}

Vector PackageRenderer::fetch_beta(const Vec3& direction, DirectionFetch mode, int& elev, int& azim) const {
  const Table& t = tables_[3];
  const DirectionGrid& g = pkg_.grid;
  if (mode == DirectionFetch::kNearest) {
    const auto [i, j] = nearest_direction_cell(g, direction);
    elev = i;
    azim = j;
    return Eigen::Map<const Vector>(t.pixel(j, i), t.channels);
  }
  const Vec2 angles = angles_from_direction(direction);
  const double fi = angles.x() / (kPi / (g.n_elev - 1));
  const double fj = angles.y() / (2.0 * kPi / g.n_azim);
  const int i0 = std::clamp(static_cast<int>(std::floor(fi)), 0, g.n_elev - 2);
  const int j0 = static_cast<int>(std::floor(fj)) % g.n_azim;
  const int j1 = (j0 + 1) % g.n_azim;
  const double a = std::clamp(fi - i0, 0.0, 1.0);
  const double b = std::clamp(fj - std::floor(fj), 0.0, 1.0);
  elev = i0;
  azim = j0;
  Vector beta(t.channels);
  const double* p00 = t.pixel(j0, i0);
  const double* p01 = t.pixel(j1, i0);
  const double* p10 = t.pixel(j0, i0 + 1);
  const double* p11 = t.pixel(j1, i0 + 1);
  for (int c = 0; c < t.channels; ++c) {
    beta[c] = (1 - a) * ((1 - b) * p00[c] + b * p01[c]) + a * ((1 - b) * p10[c] + b * p11[c]);
  }
  return beta;
}

std::optional<Fragment> PackageRenderer::trace(const Ray& ray, const RenderConfig& cfg) const {
  const auto hit = bvh_.first_hit(ray);
  if (!hit) return std::nullopt;
  Fragment frag;
  frag.face = hit->face;
  const int texel = texel_for_barycentric(pkg_.layout, hit->face, hit->barycentric);
  frag.texel = texel_pixel(pkg_.layout, hit->face, texel);
  if (!pkg_.factorized()) {
    const double* rgb = tables_[0].pixel(frag.texel.x, frag.texel.y);
    frag.color = Rgb(rgb[0], rgb[1], rgb[2]);
    return frag;
  }
  const Vector beta = fetch_beta(ray.direction, cfg.direction_fetch, frag.dir_elev, frag.dir_azim);
  const int d = pkg_.dim;
  for (int ch = 0; ch < 3; ++ch) {
    const double* emb = tables_[static_cast<std::size_t>(ch)].pixel(frag.texel.x, frag.texel.y);
    double z = 0.0;
    for (int k = 0; k < d; ++k) z += emb[k] * beta[k];
    frag.color[ch] = sigmoid(z);
  }
  return frag;
}

ImageBuffer PackageRenderer::render(const Camera& camera, const RenderConfig& cfg) const {
  check(cfg);
  const Rgb background = cfg.background.value_or(pkg_.background);
  const Intrinsics& in = camera.intrinsics;
  ImageBuffer image(in.width, in.height);
  parallel_chunks(static_cast<std::size_t>(in.height), kRowChunk, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t y = begin; y < end; ++y) {
      for (int x = 0; x < in.width; ++x) {
        const auto frag = trace(camera.pixel_ray(x, static_cast<int>(y)), cfg);
        image.set(x, static_cast<int>(y), frag ? frag->color : background);
      }
    }
  });
  return image;
}

ImageBuffer render(const AssetPackage& pkg, const Camera& camera, const RenderConfig& cfg) {
  return PackageRenderer(pkg).render(camera, cfg);
}

ImageBuffer render_float(const FactorizedField& field, const Bvh& bvh, const Camera& camera, const Rgb& background) {
  const Intrinsics& in = camera.intrinsics;
  ImageBuffer image(in.width, in.height);
  parallel_chunks(static_cast<std::size_t>(in.height), kRowChunk, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t y = begin; y < end; ++y) {
      std::vector<int> xs;
      std::vector<Vec3> points;
      std::vector<Vec3> dirs;
      for (int x = 0; x < in.width; ++x) {
        const Ray ray = camera.pixel_ray(x, static_cast<int>(y));
        const auto hit = bvh.first_hit(ray);
        if (!hit) {
          image.set(x, static_cast<int>(y), background);
          continue;
        }
        xs.push_back(x);
        points.push_back(hit->point);
        dirs.push_back(ray.direction);
      }
      if (xs.empty()) continue;
      const auto n = static_cast<Eigen::Index>(xs.size());
      Matrix p(3, n);
      Matrix d(3, n);
      for (Eigen::Index k = 0; k < n; ++k) {
        p.col(k) = points[static_cast<std::size_t>(k)];
        d.col(k) = dirs[static_cast<std::size_t>(k)];
      }
      const Matrix uvw = pos_embed_batch(field, p);
      const Matrix beta = dir_embed_batch(field, d);
      const int dim = field.dim;
      for (Eigen::Index k = 0; k < n; ++k) {
        Rgb c;
        for (int ch = 0; ch < 3; ++ch) c[ch] = sigmoid(uvw.col(k).segment(ch * dim, dim).dot(beta.col(k)));
        image.set(xs[static_cast<std::size_t>(k)], static_cast<int>(y), c);
      }
    }
  });
  return image;
}

}  // namespace rerend
