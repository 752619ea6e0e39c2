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

#include "geometry/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "geometry/union_find.hpp"
#include "scene/radiance_field.hpp"

namespace rerend {

Aabb TriMesh::bounds() const {
  Aabb box;
  for (const Vec3& v : vertices) box.expand(v);
  return box;
}

Vec3 TriMesh::face_normal(std::size_t face) const {
  const Face& f = faces[face];
  return (vertices[f[1]] - vertices[f[0]]).cross(vertices[f[2]] - vertices[f[0]]);
}

double TriMesh::face_area(std::size_t face) const { return 0.5 * face_normal(face).norm(); }

Vec3 DensityGrid::lattice_point(int i, int j, int k) const {
  // Written as lo + (extent * i) / (side - 1) so that a grid of side 2K-1
  // reproduces the lattice of side K bit for bit at even indices.
  const Vec3 extent = bounds.hi - bounds.lo;
  const double n = static_cast<double>(side - 1);
  return Vec3(bounds.lo.x() + (extent.x() * i) / n, bounds.lo.y() + (extent.y() * j) / n,
              bounds.lo.z() + (extent.z() * k) / n);
}

DensityGrid sample_density_grid(const RadianceField& field, int side, const Aabb& bounds) {
  require(side >= 2, "density grid side must be at least 2");
  require(!bounds.empty() && all_finite(bounds.lo) && all_finite(bounds.hi),
          "density grid needs finite, non-empty bounds");
  DensityGrid grid;
  grid.side = side;
  grid.bounds = bounds;
  grid.values.resize(static_cast<std::size_t>(side) * side * side);
  for (int k = 0; k < side; ++k) {
    for (int j = 0; j < side; ++j) {
      for (int i = 0; i < side; ++i) {
        const Vec3 p = grid.lattice_point(i, j, k);
        const double s = field.density(p);
        if (!std::isfinite(s) || s < 0.0) {
          std::ostringstream ss;
          ss << "density grid: invalid density " << s << " at (" << p.x() << ", " << p.y() << ", "
             << p.z() << ")";
          fail(ErrorKind::kNumeric, ss.str());
        }
        grid.values[static_cast<std::size_t>(i) +
                    static_cast<std::size_t>(side) * (j + static_cast<std::size_t>(side) * k)] = s;
      }
    }
  }
  return grid;
}

double default_iso(const DensityGrid& grid) {
  const auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
  return 0.5 * (*lo + *hi);
}

MeshReport validate_mesh(const TriMesh& mesh) {
  MeshReport report;
  report.vertices = mesh.vertices.size();
  report.faces = mesh.faces.size();

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>> edge_faces;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2] ||
        mesh.face_area(f) <= 1e-14) {
      ++report.degenerate_faces;
    }
    for (int e = 0; e < 3; ++e) {
      std::uint32_t a = face[e];
      std::uint32_t b = face[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      edge_faces[{a, b}].push_back(static_cast<std::uint32_t>(f));
    }
  }

  UnionFind components(mesh.faces.size());
  for (const auto& [edge, faces] : edge_faces) {
    if (faces.size() == 1) ++report.boundary_edges;
    if (faces.size() > 2) ++report.non_manifold_edges;
    for (std::size_t i = 1; i < faces.size(); ++i) components.unite(faces[0], faces[i]);
  }
  report.components = components.count();
  return report;
}

// --- OBJ -------------------------------------------------------------------

std::string encode_obj(const TriMesh& mesh) {
  const bool with_uv = !mesh.corner_uv.empty();
  if (with_uv) require(mesh.corner_uv.size() == mesh.faces.size(), "corner_uv size mismatch");
  std::ostringstream out;
  out.precision(17);
  out << "# rerend collision mesh: " << mesh.vertices.size() << " vertices, " << mesh.faces.size()
      << " faces\n";
  for (const Vec3& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  if (with_uv) {
    for (const auto& uv : mesh.corner_uv) {
      for (const Vec2& t : uv) out << "vt " << t.x() << ' ' << t.y() << '\n';
    }
  }
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    out << 'f';
    for (int c = 0; c < 3; ++c) {
      out << ' ' << face[c] + 1;
      if (with_uv) out << '/' << 3 * f + c + 1;
    }
    out << '\n';
  }
  return out.str();
}

namespace {

long parse_obj_index(std::string_view token, std::size_t count, const char* what) {
  long value = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || value == 0) {
    fail(ErrorKind::kDecode, std::string("OBJ: bad ") + what + " index '" + std::string(token) + "'");
  }
  const long idx = value > 0 ? value - 1 : static_cast<long>(count) + value;
  if (idx < 0 || static_cast<std::size_t>(idx) >= count) {
    fail(ErrorKind::kDecode, std::string("OBJ: ") + what + " index out of range");
  }
  return idx;
}

}  // namespace

TriMesh decode_obj(const std::string& text) {
  TriMesh mesh;
  std::vector<Vec2> texcoords;
  std::vector<std::array<long, 3>> face_uv;
  bool any_uv = false;
  bool any_plain = false;

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x() >> v.y() >> v.z())) fail(ErrorKind::kDecode, "OBJ: malformed vertex");
      mesh.vertices.push_back(v);
    } else if (tag == "vt") {
      Vec2 t;
      if (!(ls >> t.x() >> t.y())) fail(ErrorKind::kDecode, "OBJ: malformed texture coordinate");
      texcoords.push_back(t);
    } else if (tag == "f") {
      std::vector<std::pair<long, long>> corners;
      std::string tok;
      while (ls >> tok) {
        const auto slash = tok.find('/');
        const long v = parse_obj_index(std::string_view(tok).substr(0, slash),
                                       mesh.vertices.size(), "vertex");
        long t = -1;
        if (slash != std::string::npos) {
          const auto rest = std::string_view(tok).substr(slash + 1);
          const auto vt = rest.substr(0, rest.find('/'));
          if (!vt.empty()) t = parse_obj_index(vt, texcoords.size(), "texture");
        }
        corners.emplace_back(v, t);
      }
      if (corners.size() < 3) fail(ErrorKind::kDecode, "OBJ: face with fewer than 3 corners");
      for (std::size_t c = 1; c + 1 < corners.size(); ++c) {
        const std::array<std::pair<long, long>, 3> tri{corners[0], corners[c], corners[c + 1]};
        Face face;
        std::array<long, 3> uv;
        for (int k = 0; k < 3; ++k) {
          face[k] = static_cast<std::uint32_t>(tri[k].first);
          uv[k] = tri[k].second;
          (uv[k] >= 0 ? any_uv : any_plain) = true;
        }
        mesh.faces.push_back(face);
        face_uv.push_back(uv);
      }
    }
  }
  if (any_uv) {
    if (any_plain) fail(ErrorKind::kDecode, "OBJ: texture coordinates on some faces only");
    mesh.corner_uv.resize(mesh.faces.size());
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
      for (int k = 0; k < 3; ++k) mesh.corner_uv[f][k] = texcoords[face_uv[f][k]];
    }
  }
  return mesh;
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh) {
  write_text_file(path, encode_obj(mesh));
}

TriMesh read_obj(const std::filesystem::path& path) { return decode_obj(read_text_file(path)); }

// --- builders --------------------------------------------------------------

TriMesh make_icosphere(int subdivisions, double radius, Vec3 center) {
  require(subdivisions >= 0, "icosphere subdivisions must be >= 0");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& v : verts) v.normalize();
  std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      const auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      const auto idx = static_cast<std::uint32_t>(verts.size() - 1);
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const Face& f : faces) {
      const std::uint32_t a = mid(f[0], f[1]);
      const std::uint32_t b = mid(f[1], f[2]);
      const std::uint32_t c = mid(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces = std::move(next);
  }
  TriMesh mesh;
  mesh.vertices.reserve(verts.size());
  for (const Vec3& v : verts) mesh.vertices.push_back(center + radius * v);
  mesh.faces = std::move(faces);
  return mesh;
}

}  // namespace rerend
