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

#include <array>
#include <cstdint>
#include <vector>

#include "baking/atlas.hpp"
#include "baking/layout.hpp"
#include "field/field.hpp"
#include "geometry/mesh.hpp"

namespace rerend {

/// n_elev x n_azim directions; elevation_i = pi i / (n_elev - 1) measured
/// from +y (both poles included), azimuth_j = 2 pi j / n_azim from +x
/// towards +z.
struct DirectionGrid {
  int n_elev = 32;
  int n_azim = 32;

  int size() const { return n_elev * n_azim; }
  double elevation(int i) const;
  double azimuth(int j) const;
  Vec3 direction(int i, int j) const { return direction_from_angles(elevation(i), azimuth(j)); }
  void validate() const;
};

/// 1 for atlas pixels that hold a texel, 0 for padding.
std::vector<std::uint8_t> used_texel_mask(const TexelLayout& layout);

/// M_u, M_v, M_w: every texel holds pos_embed at its world position.
std::array<FloatAtlas, 3> bake_position_atlases(const FactorizedField& field, const TriMesh& mesh,
                                                const TexelLayout& layout);

/// M_beta: cell (x = j, y = i) holds dir_embed(grid.direction(i, j)).
FloatAtlas bake_direction_map(const FactorizedField& field, const DirectionGrid& grid);

/// Four-channel (R, G, B, 0) atlas of field colors seen head-on, i.e. along
/// the inverted unit face normal.
FloatAtlas bake_rgb_atlas(const FactorizedField& field, const TriMesh& mesh, const TexelLayout& layout);

}  // namespace rerend
