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
#include <filesystem>
#include <string>
#include <vector>

#include "common/math.hpp"

namespace rerend {

class RadianceField;

using Face = std::array<std::uint32_t, 3>;

/// Triangle mesh. `corner_uv`, when non-empty, holds one normalized atlas
/// coordinate per face corner (faces.size() entries).
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<std::array<Vec2, 3>> corner_uv;

  std::size_t face_count() const { return faces.size(); }
  bool empty() const { return faces.empty(); }
  Aabb bounds() const;
  Vec3 face_normal(std::size_t face) const;  // unnormalized, right-handed winding
  double face_area(std::size_t face) const;
};

/// Density samples on a K^3 lattice spanning `bounds` (corners included).
/// Index (i, j, k) -> values[i + K * (j + K * k)], i along x.
struct DensityGrid {
  int side = 0;
  Aabb bounds;
  std::vector<double> values;

  double at(int i, int j, int k) const {
    return values[static_cast<std::size_t>(i) +
                  static_cast<std::size_t>(side) *
                      (static_cast<std::size_t>(j) + static_cast<std::size_t>(side) * k)];
  }
  /// World position of lattice point (i, j, k).
  Vec3 lattice_point(int i, int j, int k) const;
};

DensityGrid sample_density_grid(const RadianceField& field, int side, const Aabb& bounds);

/// Iso-surface of `grid` at `iso` (outward = towards lower density), with
/// vertices shared along lattice edges so closed surfaces come out
/// watertight.
TriMesh marching_cubes(const DensityGrid& grid, double iso);

/// Default iso value: half of (min + max) of the grid.
double default_iso(const DensityGrid& grid);

TriMesh remove_small_components(const TriMesh& mesh, double min_face_fraction);

struct DecimationResult {
  TriMesh mesh;
  bool stalled = false;  // ran out of legal collapses before reaching the target
};

/// Quadric-error edge collapse down to at most target_faces faces. Edges
/// touching the boundary are never collapsed, and a collapse is rejected
/// when it would break the edge link condition or flip a face.
DecimationResult decimate(const TriMesh& mesh, std::size_t target_faces);

/// Number of faces enclose_dome adds for a given subdivision level:
/// 4s(2s - 1) on the hemisphere plus 4s on the floor disc, 8s^2 in total.
std::size_t dome_face_count(int subdivisions);

/// Appends an inward-facing hemisphere of `radius` centred at the
/// horizontal centre of the mesh bounds (the origin for an empty mesh) at
/// height floor_y, plus the floor disc closing it.
TriMesh enclose_dome(const TriMesh& mesh, double radius, double floor_y, int subdivisions);

struct MeshReport {
  std::size_t vertices = 0;
  std::size_t faces = 0;
  std::size_t boundary_edges = 0;
  std::size_t non_manifold_edges = 0;
  std::size_t degenerate_faces = 0;
  std::size_t components = 0;
};

MeshReport validate_mesh(const TriMesh& mesh);

/// Wavefront OBJ with `v`, `vt` and `f v/vt` (or `f v` when the mesh has no
/// texture coordinates). Faces are written in index order.
std::string encode_obj(const TriMesh& mesh);
TriMesh decode_obj(const std::string& text);
void write_obj(const std::filesystem::path& path, const TriMesh& mesh);
TriMesh read_obj(const std::filesystem::path& path);

/// Mesh builders used by tests and fixtures.
TriMesh make_icosphere(int subdivisions, double radius = 1.0, Vec3 center = Vec3::Zero());

}  // namespace rerend
