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

#include "baking/bake.hpp"

#include <cmath>

#include "common/error.hpp"
#include "common/parallel.hpp"

namespace rerend {

double DirectionGrid::elevation(int i) const { return kPi * i / (n_elev - 1); }

double DirectionGrid::azimuth(int j) const { return 2.0 * kPi * j / n_azim; }

void DirectionGrid::validate() const {
  require(n_elev >= 2 && n_azim >= 1, "direction grid needs n_elev >= 2 and n_azim >= 1");
  require(n_elev <= kMaxAtlasSide && n_azim <= kMaxAtlasSide, "direction grid exceeds the maximum atlas side");
}

std::vector<std::uint8_t> used_texel_mask(const TexelLayout& layout) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(layout.width) * layout.height, 0);
  for (std::size_t f = 0; f < layout.n_faces; ++f) {
    for (int t = 0; t < layout.texels_per_face; ++t) {
      const PixelCoord px = texel_pixel(layout, f, t);
      mask[static_cast<std::size_t>(px.y) * layout.width + px.x] = 1;
    }
  }
  return mask;
}

std::array<FloatAtlas, 3> bake_position_atlases(const FactorizedField& field, const TriMesh& mesh,
                                                const TexelLayout& layout) {
  require(mesh.faces.size() == layout.n_faces, "layout face count does not match the mesh");
  const int d = field.dim;
  std::array<FloatAtlas, 3> out = {FloatAtlas(d, layout.width, layout.height, AtlasRole::kU),
                                   FloatAtlas(d, layout.width, layout.height, AtlasRole::kV),
                                   FloatAtlas(d, layout.width, layout.height, AtlasRole::kW)};
  // Texels are evaluated one at a time through pos_embed so that a baked
  // value equals a fresh evaluation at the texel position bit for bit.
  parallel_chunks(layout.n_faces, 64, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f) {
      for (int t = 0; t < layout.texels_per_face; ++t) {
        const EmbeddingTriplet e = pos_embed(field, texel_world_position(mesh, f, t, layout));
        const PixelCoord px = texel_pixel(layout, f, t);
        for (int c = 0; c < d; ++c) {
          out[0].at(c, px.x, px.y) = static_cast<float>(e.u[c]);
          out[1].at(c, px.x, px.y) = static_cast<float>(e.v[c]);
          out[2].at(c, px.x, px.y) = static_cast<float>(e.w[c]);
        }
      }
    }
  });
  return out;
}

FloatAtlas bake_direction_map(const FactorizedField& field, const DirectionGrid& grid) {
  grid.validate();
  FloatAtlas out(field.dim, grid.n_azim, grid.n_elev, AtlasRole::kBeta);
  parallel_chunks(static_cast<std::size_t>(grid.n_elev), 1, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (int j = 0; j < grid.n_azim; ++j) {
        const Vector beta = dir_embed(field, grid.direction(static_cast<int>(i), j));
        for (int c = 0; c < field.dim; ++c) out.at(c, j, static_cast<int>(i)) = static_cast<float>(beta[c]);
      }
    }
  });
  return out;
}

FloatAtlas bake_rgb_atlas(const FactorizedField& field, const TriMesh& mesh, const TexelLayout& layout) {
  require(mesh.faces.size() == layout.n_faces, "layout face count does not match the mesh");
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const double len = mesh.face_normal(f).norm();
    if (!(len > 1e-300) || !std::isfinite(len)) {
      fail(ErrorKind::kNumeric, "face " + std::to_string(f) + " has a degenerate normal");
    }
  }
  FloatAtlas out(4, layout.width, layout.height, AtlasRole::kRgb);
  parallel_chunks(layout.n_faces, 64, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f) {
      const Vec3 view = -mesh.face_normal(f).normalized();
      const Vector beta = dir_embed(field, view);
      for (int t = 0; t < layout.texels_per_face; ++t) {
        const Rgb c = predict_color(pos_embed(field, texel_world_position(mesh, f, t, layout)), beta);
        const PixelCoord px = texel_pixel(layout, f, t);
        for (int k = 0; k < 3; ++k) out.at(k, px.x, px.y) = static_cast<float>(c[k]);
      }
    }
  });
  return out;
}

}  // namespace rerend
