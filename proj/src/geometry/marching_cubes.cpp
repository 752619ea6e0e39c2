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

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "common/error.hpp"
#include "geometry/mesh.hpp"

namespace rerend {

namespace {

// Corner c sits at (c & 1, (c >> 1) & 1, (c >> 2) & 1) in this file's
// convention; edges are listed by their two corners.
constexpr std::array<std::array<int, 2>, 12> kEdges = {{
    {0, 1}, {2, 3}, {4, 5}, {6, 7},  // along x
    {0, 2}, {1, 3}, {4, 6}, {5, 7},  // along y
    {0, 4}, {1, 5}, {2, 6}, {3, 7},  // along z
}};

// Cube faces as corner cycles.
constexpr std::array<std::array<int, 4>, 6> kFaces = {{
    {0, 2, 6, 4},  // x = 0
    {1, 3, 7, 5},  // x = 1
    {0, 1, 5, 4},  // y = 0
    {2, 3, 7, 6},  // y = 1
    {0, 1, 3, 2},  // z = 0
    {4, 5, 7, 6},  // z = 1
}};

Vec3 corner_offset(int c) { return Vec3(c & 1, (c >> 1) & 1, (c >> 2) & 1); }

int edge_between(int a, int b) {
  for (int e = 0; e < 12; ++e) {
    if ((kEdges[e][0] == a && kEdges[e][1] == b) || (kEdges[e][0] == b && kEdges[e][1] == a)) {
      return e;
    }
  }
  return -1;
}

using CaseTriangles = std::vector<std::array<int, 3>>;

// Builds the triangulation of one of the 256 inside/outside corner
// patterns. On each cube face the crossed edges are paired into segments;
// a face with two diagonal inside corners is resolved by cutting each
// inside corner off on its own, which is the same decision the neighbouring
// cube makes for the shared face, so the surface stays crack-free. The
// segments chain into closed loops that are fanned into triangles and
// oriented so normals point away from the inside corners.
CaseTriangles triangulate_case(int mask) {
  auto inside = [mask](int c) { return ((mask >> c) & 1) != 0; };

  std::vector<std::array<int, 2>> segments;
  for (const auto& face : kFaces) {
    std::vector<int> crossed;  // in cyclic order around the face
    for (int i = 0; i < 4; ++i) {
      const int a = face[i];
      const int b = face[(i + 1) % 4];
      if (inside(a) != inside(b)) crossed.push_back(edge_between(a, b));
    }
    if (crossed.size() == 2) {
      segments.push_back({crossed[0], crossed[1]});
    } else if (crossed.size() == 4) {
      // Edge i of the cycle runs from face[i] to face[i+1]. Pair the two
      // edges adjacent to each inside corner.
      if (inside(face[0])) {
        segments.push_back({crossed[3], crossed[0]});
        segments.push_back({crossed[1], crossed[2]});
      } else {
        segments.push_back({crossed[0], crossed[1]});
        segments.push_back({crossed[2], crossed[3]});
      }
    }
  }

  CaseTriangles tris;
  std::vector<bool> used(segments.size(), false);
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    std::vector<int> loop = {segments[s][0], segments[s][1]};
    used[s] = true;
    for (;;) {
      bool extended = false;
      for (std::size_t k = 0; k < segments.size(); ++k) {
        if (used[k]) continue;
        int next = -1;
        if (segments[k][0] == loop.back()) next = segments[k][1];
        if (segments[k][1] == loop.back()) next = segments[k][0];
        if (next < 0) continue;
        used[k] = true;
        extended = true;
        if (next != loop.front()) loop.push_back(next);
        break;
      }
      if (!extended) break;
    }

    // Orientation: Newell normal of the loop against the direction from
    // the inside corners to the outside ones.
    Vec3 newell = Vec3::Zero();
    Vec3 outward = Vec3::Zero();
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const auto& e0 = kEdges[loop[i]];
      const auto& e1 = kEdges[loop[(i + 1) % loop.size()]];
      const Vec3 p = 0.5 * (corner_offset(e0[0]) + corner_offset(e0[1]));
      const Vec3 q = 0.5 * (corner_offset(e1[0]) + corner_offset(e1[1]));
      newell += p.cross(q);
      const int in = inside(e0[0]) ? e0[0] : e0[1];
      const int out = inside(e0[0]) ? e0[1] : e0[0];
      outward += corner_offset(out) - corner_offset(in);
    }
    if (newell.dot(outward) < 0.0) std::reverse(loop.begin(), loop.end());
    for (std::size_t i = 1; i + 1 < loop.size(); ++i) tris.push_back({loop[0], loop[i], loop[i + 1]});
  }
  return tris;
}

const std::array<CaseTriangles, 256>& case_table() {
  static const std::array<CaseTriangles, 256> table = [] {
    std::array<CaseTriangles, 256> t;
    for (int m = 0; m < 256; ++m) t[m] = triangulate_case(m);
    return t;
  }();
  return table;
}

}  // namespace

TriMesh marching_cubes(const DensityGrid& grid, double iso) {
  require(grid.side >= 2, "marching cubes needs a grid of side >= 2");
  const auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
  if (!(iso > *lo && iso < *hi)) {
    fail(ErrorKind::kInvalidArgument, "marching cubes: iso value is not bracketed by the grid range");
  }

  const auto& table = case_table();
  const int n = grid.side;
  TriMesh mesh;
  // Lattice edge (lattice point index, axis) -> mesh vertex.
  std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;

  auto lattice_index = [n](int i, int j, int k) {
    return static_cast<std::uint64_t>(i) +
           static_cast<std::uint64_t>(n) * (static_cast<std::uint64_t>(j) + static_cast<std::uint64_t>(n) * k);
  };

  for (int k = 0; k + 1 < n; ++k) {
    for (int j = 0; j + 1 < n; ++j) {
      for (int i = 0; i + 1 < n; ++i) {
        std::array<double, 8> v;
        int mask = 0;
        for (int c = 0; c < 8; ++c) {
          v[c] = grid.at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
          if (v[c] > iso) mask |= 1 << c;
        }
        if (mask == 0 || mask == 255) continue;

        auto vertex_on_edge = [&](int e) {
          const int a = kEdges[e][0];
          const int b = kEdges[e][1];
          const int ai = i + (a & 1), aj = j + ((a >> 1) & 1), ak = k + ((a >> 2) & 1);
          const int axis = e / 4;
          const std::uint64_t key = lattice_index(ai, aj, ak) * 3 + static_cast<std::uint64_t>(axis);
          const auto it = edge_vertex.find(key);
          if (it != edge_vertex.end()) return it->second;
          const double t = (iso - v[a]) / (v[b] - v[a]);
          const Vec3 pa = grid.lattice_point(ai, aj, ak);
          const Vec3 pb = grid.lattice_point(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1));
          mesh.vertices.push_back(pa + t * (pb - pa));
          const auto idx = static_cast<std::uint32_t>(mesh.vertices.size() - 1);
          edge_vertex.emplace(key, idx);
          return idx;
        };

        for (const auto& tri : table[mask]) {
          mesh.faces.push_back({vertex_on_edge(tri[0]), vertex_on_edge(tri[1]), vertex_on_edge(tri[2])});
        }
      }
    }
  }
  return mesh;
}

}  // namespace rerend
