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

// Mesh conditioning: small-component removal and dome enclosure.

#include <algorithm>
#include <cmath>
#include <map>

#include "common/error.hpp"
#include "geometry/mesh.hpp"
#include "geometry/union_find.hpp"

namespace rerend {

namespace {

// Keeps the faces flagged in `keep` (in order) and drops unreferenced
// vertices, preserving the relative vertex order.
TriMesh compact(const TriMesh& mesh, const std::vector<bool>& keep) {
  TriMesh out;
  std::vector<std::int64_t> remap(mesh.vertices.size(), -1);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (!keep[f]) continue;
    for (std::uint32_t v : mesh.faces[f]) remap[v] = 0;
  }
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (remap[v] < 0) continue;
    remap[v] = static_cast<std::int64_t>(out.vertices.size());
    out.vertices.push_back(mesh.vertices[v]);
  }
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (!keep[f]) continue;
    const Face& face = mesh.faces[f];
    out.faces.push_back({static_cast<std::uint32_t>(remap[face[0]]),
                         static_cast<std::uint32_t>(remap[face[1]]),
                         static_cast<std::uint32_t>(remap[face[2]])});
    if (!mesh.corner_uv.empty()) out.corner_uv.push_back(mesh.corner_uv[f]);
  }
  return out;
}

}  // namespace

TriMesh remove_small_components(const TriMesh& mesh, double min_face_fraction) {
  require(min_face_fraction >= 0.0 && min_face_fraction < 1.0,
          "min_face_fraction must be in [0, 1)");
  if (mesh.faces.empty() || min_face_fraction == 0.0) return mesh;

  UnionFind uf(mesh.faces.size());
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> first_face;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    for (int e = 0; e < 3; ++e) {
      const auto key = std::minmax(mesh.faces[f][e], mesh.faces[f][(e + 1) % 3]);
      const auto [it, inserted] = first_face.emplace(key, static_cast<std::uint32_t>(f));
      if (!inserted) uf.unite(it->second, f);
    }
  }
  const double threshold = min_face_fraction * static_cast<double>(mesh.faces.size());
  std::vector<bool> keep(mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    keep[f] = static_cast<double>(uf.size_of(f)) >= threshold;
  }
  return compact(mesh, keep);
}

std::size_t dome_face_count(int subdivisions) {
  const auto s = static_cast<std::size_t>(subdivisions);
  return 8 * s * s;
}

TriMesh enclose_dome(const TriMesh& mesh, double radius, double floor_y, int subdivisions) {
  require(subdivisions >= 1, "dome subdivisions must be >= 1");
  require(radius > 0.0, "dome radius must be positive");

  Vec3 center(0.0, floor_y, 0.0);
  if (!mesh.vertices.empty()) {
    const Aabb box = mesh.bounds();
    center.x() = box.center().x();
    center.z() = box.center().z();
    double extent = 0.0;
    for (const Vec3& v : mesh.vertices) extent = std::max(extent, (v - center).norm());
    if (!(radius > extent)) {
      fail(ErrorKind::kInvalidArgument, "dome radius " + std::to_string(radius) +
                                            " does not exceed the scene extent " +
                                            std::to_string(extent));
    }
  }

  TriMesh out = mesh;
  const int segments = 4 * subdivisions;
  const int rings = subdivisions;  // horizon ring 0 .. ring rings-1, then the pole
  const auto base = static_cast<std::uint32_t>(out.vertices.size());
  for (int r = 0; r < rings; ++r) {
    const double elev = 0.5 * kPi * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double az = 2.0 * kPi * s / segments;
      out.vertices.push_back(center + radius * Vec3(std::cos(elev) * std::cos(az), std::sin(elev),
                                                    std::cos(elev) * std::sin(az)));
    }
  }
  const auto pole = static_cast<std::uint32_t>(out.vertices.size());
  out.vertices.push_back(center + Vec3(0.0, radius, 0.0));
  const auto floor_center = static_cast<std::uint32_t>(out.vertices.size());
  out.vertices.push_back(center);

  auto ring_vertex = [&](int r, int s) {
    return base + static_cast<std::uint32_t>(r * segments + ((s % segments) + segments) % segments);
  };
  // Winding is chosen so that face normals point towards the centre.
  for (int r = 0; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      const auto a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
      const auto c = ring_vertex(r + 1, s), d = ring_vertex(r + 1, s + 1);
      out.faces.push_back({a, b, c});
      out.faces.push_back({b, d, c});
    }
  }
  for (int s = 0; s < segments; ++s) {
    out.faces.push_back({ring_vertex(rings - 1, s), ring_vertex(rings - 1, s + 1), pole});
  }
  for (int s = 0; s < segments; ++s) {
    out.faces.push_back({ring_vertex(0, s), floor_center, ring_vertex(0, s + 1)});
  }
  if (!out.corner_uv.empty()) out.corner_uv.resize(out.faces.size(), {Vec2::Zero(), Vec2::Zero(), Vec2::Zero()});
  return out;
}

}  // namespace rerend
