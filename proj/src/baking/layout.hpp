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

// Per-face texel packing.
//
// Faces 2q and 2q+1 share quad q. Inside a quad, texel-space coordinates
// (i, j) run i = column and j = p-1-row, so (s, t) = ((i+0.5)/p, (j+0.5)/p)
// parameterize the face as v0 + s (v1 - v0) + t (v2 - v0).
//
//  * The even face owns the pixels with i + j < p - 1 (lower-left), plus the
//    diagonal pixels i + j = p - 1 with even i.
//  * The odd face uses the mirrored frame: its local (i', j') sits at quad
//    (p-1-i', p-1-j'). It owns the rest of the diagonal and the upper-right.
//
// For odd p the odd face is one pixel short of ceil(p^2/2); its last texel
// (local pixel (p-1, 0), a diagonal pixel owned by the even face in the quad)
// lives in a spill column to the right of the quad, which is then p+1 wide.
//
// Texels of a face are numbered row-major over its local (j, i) order,
// spill texel last.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "common/math.hpp"
#include "geometry/mesh.hpp"

namespace rerend {

int texel_count(int p);

struct TexelLayout {
  int p = 6;
  int texels_per_face = 18;
  std::size_t n_faces = 0;
  int quad_width = 6;  // p, or p + 1 for odd p (spill column)
  int quads_per_row = 1;
  int width = 0;   // atlas pixels
  int height = 0;

  std::size_t quad_count() const { return (n_faces + 1) / 2; }
  std::size_t used_texels() const { return n_faces * static_cast<std::size_t>(texels_per_face); }
};

inline constexpr int kMaxAtlasSide = 8192;

TexelLayout layout_atlas(std::size_t n_faces, int p, int max_width = kMaxAtlasSide);

struct PixelCoord {
  int x = 0;  // column
  int y = 0;  // row, top to bottom
  bool operator==(const PixelCoord&) const = default;
};

/// Local texel-space coordinates (i, j) of a face's texel.
std::array<int, 2> texel_local(const TexelLayout& layout, std::size_t face, int texel);

/// Atlas pixel holding a face's texel.
PixelCoord texel_pixel(const TexelLayout& layout, std::size_t face, int texel);

struct TexelRef {
  std::size_t face = 0;
  int texel = 0;
};

/// Inverse of texel_pixel; false for padding pixels.
bool pixel_texel(const TexelLayout& layout, PixelCoord pixel, TexelRef& out);

/// Barycentric weights (of v0, v1, v2) of a texel centre; see texel_world_position.
std::array<double, 3> texel_barycentric(const TexelLayout& layout, std::size_t face, int texel);

/// Texel centre on the face: the quad pixel centre (s, t) gives the weights
/// (1-s-t, s, t), which are then pulled towards the centroid by 1/p^2 so
/// that diagonal texels lie strictly inside and p = 1 yields the centroid.
Vec3 texel_world_position(const TriMesh& mesh, std::size_t face, int texel, const TexelLayout& layout);

/// Texel fetched for a surface point given by its barycentric weights: the
/// nearest-neighbour pixel of the inverse mapping, snapped onto the face's
/// own texels.
int texel_for_barycentric(const TexelLayout& layout, std::size_t face, const std::array<double, 3>& bary);

/// Per-corner normalized texel coordinates (u = x / width, v = y / height,
/// origin at the top-left of the atlas image) of every face.
void assign_corner_uv(TriMesh& mesh, const TexelLayout& layout);

/// Uncompressed bytes of the three position atlases: 3 * n_faces * T * D.
std::size_t position_payload_bytes(const TexelLayout& layout, int dim);

}  // namespace rerend
