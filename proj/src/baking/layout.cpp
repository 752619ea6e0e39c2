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

#include "baking/layout.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace rerend {

namespace {

bool owns(int p, bool odd_face, int i, int j) {
  if (i < 0 || j < 0 || i >= p || j >= p) return false;
  if (i + j < p - 1) return true;
  if (i + j > p - 1) return false;
  // Diagonal: parity of the quad column decides.
  const int column = odd_face ? p - 1 - i : i;
  return (column % 2 == 1) == odd_face;
}

bool has_spill(const TexelLayout& l, std::size_t face) { return (l.p % 2 == 1) && (face % 2 == 1); }

void check_texel(const TexelLayout& l, std::size_t face, int texel) {
  if (face >= l.n_faces || texel < 0 || texel >= l.texels_per_face) {
    fail(ErrorKind::kInvalidArgument, "texel (" + std::to_string(face) + ", " + std::to_string(texel) +
                                          ") is outside the layout");
  }
}

// Index of local pixel (i, j) among the face's owned pixels in row-major
// (j, then i) order. Row j holds the owned pixels i = 0 .. p-2-j plus
// possibly the diagonal pixel i = p-1-j.
int owned_index(int p, bool odd_face, int i, int j) {
  int index = 0;
  for (int r = 0; r < j; ++r) index += (p - 1 - r) + (owns(p, odd_face, p - 1 - r, r) ? 1 : 0);
  return index + i;
}

}  // namespace

int texel_count(int p) {
  require(p >= 1, "texels per side p must be >= 1");
  return (p * p + 1) / 2;
}

TexelLayout layout_atlas(std::size_t n_faces, int p, int max_width) {
  require(n_faces >= 1, "layout needs at least one face");
  require(p >= 1 && p <= 64, "texels per side p must be in [1, 64]");
  require(max_width >= 1 && max_width <= kMaxAtlasSide, "max atlas width must be in [1, 8192]");
  TexelLayout l;
  l.p = p;
  l.texels_per_face = texel_count(p);
  l.n_faces = n_faces;
  l.quad_width = p + (p % 2);
  const std::size_t quads = l.quad_count();
  auto per_row = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(quads))));
  while (per_row * per_row < quads) ++per_row;
  while (per_row > 1 && (per_row - 1) * (per_row - 1) >= quads) --per_row;
  const std::size_t rows = (quads + per_row - 1) / per_row;
  const std::size_t width = per_row * static_cast<std::size_t>(l.quad_width);
  const std::size_t height = rows * static_cast<std::size_t>(p);
  if (width > static_cast<std::size_t>(max_width) || height > static_cast<std::size_t>(max_width)) {
    fail(ErrorKind::kInvalidArgument,
         "atlas of " + std::to_string(width) + "x" + std::to_string(height) + " exceeds the maximum side " +
             std::to_string(max_width) + "; use a smaller p or fewer faces");
  }
  l.quads_per_row = static_cast<int>(per_row);
  l.width = static_cast<int>(width);
  l.height = static_cast<int>(height);
  return l;
}

std::array<int, 2> texel_local(const TexelLayout& l, std::size_t face, int texel) {
  check_texel(l, face, texel);
  const bool odd = face % 2 == 1;
  const int p = l.p;
  if (has_spill(l, face) && texel == l.texels_per_face - 1) return {p - 1, 0};
  int remaining = texel;
  for (int j = 0; j < p; ++j) {
    const int in_row = (p - 1 - j) + (owns(p, odd, p - 1 - j, j) ? 1 : 0);
    if (remaining < in_row) return {remaining, j};
    remaining -= in_row;
  }
  fail(ErrorKind::kInvalidArgument, "texel index beyond the face's texels");
}

PixelCoord texel_pixel(const TexelLayout& l, std::size_t face, int texel) {
  const auto [i, j] = texel_local(l, face, texel);
  const std::size_t quad = face / 2;
  const int ox = static_cast<int>(quad % static_cast<std::size_t>(l.quads_per_row)) * l.quad_width;
  const int oy = static_cast<int>(quad / static_cast<std::size_t>(l.quads_per_row)) * l.p;
  const int p = l.p;
  if (has_spill(l, face) && texel == l.texels_per_face - 1) return {ox + p, oy};
  if (face % 2 == 0) return {ox + i, oy + (p - 1 - j)};
  return {ox + (p - 1 - i), oy + j};
}

bool pixel_texel(const TexelLayout& l, PixelCoord px, TexelRef& out) {
  if (px.x < 0 || px.y < 0 || px.x >= l.width || px.y >= l.height) return false;
  const int p = l.p;
  const int qx = px.x / l.quad_width;
  const int qy = px.y / p;
  const std::size_t quad = static_cast<std::size_t>(qy) * static_cast<std::size_t>(l.quads_per_row) +
                           static_cast<std::size_t>(qx);
  const int x = px.x - qx * l.quad_width;
  const int y = px.y - qy * p;
  if (x == p) {  // spill column
    const std::size_t face = 2 * quad + 1;
    if (y != 0 || face >= l.n_faces) return false;
    out = TexelRef{face, l.texels_per_face - 1};
    return true;
  }
  const int i = x;
  const int j = p - 1 - y;
  if (owns(p, false, i, j)) {
    if (2 * quad >= l.n_faces) return false;
    out = TexelRef{2 * quad, owned_index(p, false, i, j)};
    return true;
  }
  const std::size_t face = 2 * quad + 1;
  if (face >= l.n_faces) return false;
  out = TexelRef{face, owned_index(p, true, p - 1 - i, p - 1 - j)};
  return true;
}

std::array<double, 3> texel_barycentric(const TexelLayout& l, std::size_t face, int texel) {
  const auto [i, j] = texel_local(l, face, texel);
  const double p = l.p;
  const double s = (i + 0.5) / p;
  const double t = (j + 0.5) / p;
  const double lambda = 1.0 / (p * p);
  const double third = lambda / 3.0;
  return {(1.0 - lambda) * (1.0 - s - t) + third, (1.0 - lambda) * s + third, (1.0 - lambda) * t + third};
}

Vec3 texel_world_position(const TriMesh& mesh, std::size_t face, int texel, const TexelLayout& l) {
  require(face < mesh.faces.size(), "face index outside the mesh");
  const auto b = texel_barycentric(l, face, texel);
  const Face& f = mesh.faces[face];
  return b[0] * mesh.vertices[f[0]] + b[1] * mesh.vertices[f[1]] + b[2] * mesh.vertices[f[2]];
}

int texel_for_barycentric(const TexelLayout& l, std::size_t face, const std::array<double, 3>& bary) {
  const int p = l.p;
  const bool odd = face % 2 == 1;
  const double lambda = 1.0 / (static_cast<double>(p) * p);
  const double third = lambda / 3.0;
  const double s = (bary[1] - third) / (1.0 - lambda);
  const double t = (bary[2] - third) / (1.0 - lambda);
  int i = std::clamp(static_cast<int>(std::floor(s * p)), 0, p - 1);
  int j = std::clamp(static_cast<int>(std::floor(t * p)), 0, p - 1);
  if (has_spill(l, face) && i == p - 1 && j == 0) return l.texels_per_face - 1;
  while (!owns(p, odd, i, j)) {
    if (i >= j) {
      --i;
    } else {
      --j;
    }
  }
  return owned_index(p, odd, i, j);
}

void assign_corner_uv(TriMesh& mesh, const TexelLayout& l) {
  require(mesh.faces.size() == l.n_faces, "layout face count does not match the mesh");
  mesh.corner_uv.resize(mesh.faces.size());
  const double p = l.p;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const std::size_t quad = f / 2;
    const double ox = static_cast<double>(quad % static_cast<std::size_t>(l.quads_per_row)) * l.quad_width;
    const double oy = static_cast<double>(quad / static_cast<std::size_t>(l.quads_per_row)) * p;
    // Local (s, t) of the corners: v0 (0, 0), v1 (1, 0), v2 (0, 1).
    const std::array<std::array<double, 2>, 3> st = {{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
    for (int c = 0; c < 3; ++c) {
      double x = st[c][0] * p;
      double y = p - st[c][1] * p;
      if (f % 2 == 1) {
        x = p - x;
        y = p - y;
      }
      mesh.corner_uv[f][c] = Vec2((ox + x) / l.width, (oy + y) / l.height);
    }
  }
}

std::size_t position_payload_bytes(const TexelLayout& l, int dim) {
  return 3 * l.used_texels() * static_cast<std::size_t>(dim);
}

}  // namespace rerend
