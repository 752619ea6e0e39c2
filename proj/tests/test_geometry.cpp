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

#include "common/error.hpp"
#include "common/rng.hpp"
#include "geometry/bvh.hpp"
#include "geometry/mesh.hpp"
#include "scene/radiance_field.hpp"

namespace rerend {
namespace {

class SphereIndicator final : public RadianceField {
 public:
  double density(const Vec3& p) const override { return p.norm() < 1.0 ? 10.0 : 0.0; }
  Rgb color(const Vec3&, const Vec3&) const override { return Rgb::Ones(); }
  Aabb bounds() const override { return Aabb{Vec3::Constant(-1), Vec3::Constant(1)}; }
};

class EmptyField final : public RadianceField {
 public:
  double density(const Vec3&) const override { return 0.0; }
  Rgb color(const Vec3&, const Vec3&) const override { return Rgb::Zero(); }
  Aabb bounds() const override { return Aabb{Vec3::Constant(-1), Vec3::Constant(1)}; }
};

const Aabb kCube{Vec3::Constant(-1.5), Vec3::Constant(1.5)};

Vec3 random_unit(Rng& rng) {
  for (;;) {
    const Vec3 v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double n = v.norm();
    if (n > 1e-3 && n <= 1.0) return v / n;
  }
}

TEST(DensityGrid, ZeroField) {
  const DensityGrid g = sample_density_grid(EmptyField{}, 8, kCube);
  EXPECT_EQ(g.values.size(), 512u);
  for (double v : g.values) EXPECT_EQ(v, 0.0);
}

TEST(DensityGrid, IndicatorValues) {
  const DensityGrid g = sample_density_grid(SphereIndicator{}, 64, kCube);
  for (int k = 0; k < 64; ++k) {
    for (int j = 0; j < 64; ++j) {
      for (int i = 0; i < 64; ++i) {
        const double expected = g.lattice_point(i, j, k).norm() < 1.0 ? 10.0 : 0.0;
        ASSERT_EQ(g.at(i, j, k), expected);
      }
    }
  }
}

TEST(DensityGrid, RefinementSharesLatticePoints) {
  TexturedSphere sphere;
  const DensityGrid coarse = sample_density_grid(sphere, 9, kCube);
  const DensityGrid fine = sample_density_grid(sphere, 17, kCube);
  for (int k = 0; k < 9; ++k) {
    for (int j = 0; j < 9; ++j) {
      for (int i = 0; i < 9; ++i) {
        ASSERT_EQ(coarse.at(i, j, k), fine.at(2 * i, 2 * j, 2 * k));
        ASSERT_EQ(coarse.lattice_point(i, j, k), fine.lattice_point(2 * i, 2 * j, 2 * k));
      }
    }
  }
}

TEST(DensityGrid, RejectsSmallSide) { EXPECT_THROW(sample_density_grid(EmptyField{}, 1, kCube), Error); }

TEST(MarchingCubes, SingleCornerGivesOneTriangle) {
  DensityGrid g;
  g.side = 2;
  g.bounds = Aabb{Vec3::Zero(), Vec3::Ones()};
  g.values.assign(8, 0.0);
  g.values[0] = 1.0;
  const TriMesh m = marching_cubes(g, 0.5);
  ASSERT_EQ(m.faces.size(), 1u);
  // Oriented away from the inside corner at the origin.
  const Vec3 n = m.face_normal(0);
  EXPECT_GT(n.dot(Vec3::Ones()), 0.0);
}

TEST(MarchingCubes, EveryCaseIsClosedWithinCube) {
  // Each of the 254 non-trivial cases, embedded with an outside border, must
  // give a closed surface.
  for (int mask = 1; mask < 255; ++mask) {
    DensityGrid g;
    g.side = 4;
    g.bounds = Aabb{Vec3::Zero(), Vec3::Constant(3.0)};
    g.values.assign(64, 0.0);
    for (int c = 0; c < 8; ++c) {
      if ((mask >> c) & 1) {
        g.values[(1 + (c & 1)) + 4 * ((1 + ((c >> 1) & 1)) + 4 * (1 + ((c >> 2) & 1)))] = 1.0;
      }
    }
    const MeshReport r = validate_mesh(marching_cubes(g, 0.5));
    ASSERT_EQ(r.boundary_edges, 0u) << "mask " << mask;
    ASSERT_EQ(r.degenerate_faces, 0u) << "mask " << mask;
  }
}

TEST(MarchingCubes, SphereFixture) {
  const DensityGrid g = sample_density_grid(SphereIndicator{}, 64, kCube);
  const TriMesh m = marching_cubes(g, 5.0);
  const double cell = 3.0 / 63.0;
  ASSERT_GT(m.faces.size(), 1000u);
  for (const Vec3& v : m.vertices) EXPECT_NEAR(v.norm(), 1.0, 2.0 * cell);
  const MeshReport r = validate_mesh(m);
  EXPECT_EQ(r.boundary_edges, 0u);
  EXPECT_EQ(r.non_manifold_edges, 0u);
  EXPECT_EQ(r.components, 1u);
  // Outward orientation: signed volume is positive.
  double volume = 0.0;
  for (const Face& f : m.faces) {
    volume += m.vertices[f[0]].dot(m.vertices[f[1]].cross(m.vertices[f[2]])) / 6.0;
  }
  EXPECT_NEAR(volume, 4.0 / 3.0 * kPi, 0.1);
}

TEST(MarchingCubes, ConstantGridIsAnError) {
  const DensityGrid g = sample_density_grid(EmptyField{}, 4, kCube);
  EXPECT_THROW(marching_cubes(g, 0.0), Error);
  EXPECT_EQ(default_iso(sample_density_grid(SphereIndicator{}, 8, kCube)), 5.0);
}

TEST(Components, RemovesSmallSphere) {
  TriMesh big = make_icosphere(3);                            // 1280 faces
  const TriMesh small = make_icosphere(1, 0.3, Vec3(3, 0, 0));  // 80 faces
  const auto offset = static_cast<std::uint32_t>(big.vertices.size());
  for (const Vec3& v : small.vertices) big.vertices.push_back(v);
  for (const Face& f : small.faces) big.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
  ASSERT_EQ(validate_mesh(big).components, 2u);

  const TriMesh kept = remove_small_components(big, 0.2);
  EXPECT_EQ(kept.faces.size(), 1280u);
  EXPECT_EQ(validate_mesh(kept).components, 1u);
  for (const Vec3& v : kept.vertices) EXPECT_NEAR(v.norm(), 1.0, 1e-12);

  EXPECT_EQ(remove_small_components(big, 0.0).faces.size(), big.faces.size());
  EXPECT_EQ(remove_small_components(make_icosphere(2), 0.5).faces.size(), 320u);
  EXPECT_THROW(remove_small_components(big, 1.0), Error);
}

TEST(Decimate, TargetAboveCountIsNoop) {
  const TriMesh m = make_icosphere(2);
  const DecimationResult r = decimate(m, 1000);
  EXPECT_FALSE(r.stalled);
  EXPECT_EQ(r.mesh.faces, m.faces);
  EXPECT_EQ(r.mesh.vertices, m.vertices);
}

TEST(Decimate, IcosphereStaysOnSphereAndClosed) {
  const TriMesh m = make_icosphere(5);
  ASSERT_EQ(m.faces.size(), 20480u);
  ASSERT_EQ(validate_mesh(m).boundary_edges, 0u);
  const DecimationResult r = decimate(m, 5120);
  EXPECT_FALSE(r.stalled);
  EXPECT_LE(r.mesh.faces.size(), 5376u);
  const MeshReport rep = validate_mesh(r.mesh);
  EXPECT_EQ(rep.boundary_edges, 0u);
  EXPECT_EQ(rep.non_manifold_edges, 0u);
  EXPECT_EQ(rep.degenerate_faces, 0u);

  // Hausdorff estimate: densely sample every face and measure distance to the unit sphere.
  double worst = 0.0;
  for (const Face& f : r.mesh.faces) {
    for (int a = 0; a <= 4; ++a) {
      for (int b = 0; a + b <= 4; ++b) {
        const Vec3 p = (a * r.mesh.vertices[f[0]] + b * r.mesh.vertices[f[1]] +
                        (4 - a - b) * r.mesh.vertices[f[2]]) / 4.0;
        worst = std::max(worst, std::abs(p.norm() - 1.0));
      }
    }
  }
  EXPECT_LT(worst, 0.05);
}

TEST(Decimate, KeepsBoundaryOfOpenMesh) {
  TriMesh m = make_icosphere(3);
  // Cut away the top cap to make an open mesh.
  std::vector<Face> kept;
  for (const Face& f : m.faces) {
    if ((m.vertices[f[0]] + m.vertices[f[1]] + m.vertices[f[2]]).y() / 3.0 < 0.5) kept.push_back(f);
  }
  m.faces = kept;
  const std::size_t boundary = validate_mesh(m).boundary_edges;
  ASSERT_GT(boundary, 0u);
  const DecimationResult r = decimate(m, m.faces.size() / 3);
  EXPECT_LE(r.mesh.faces.size(), m.faces.size());
  EXPECT_EQ(validate_mesh(r.mesh).boundary_edges, boundary);
}

TEST(Decimate, RejectsTinyTarget) { EXPECT_THROW(decimate(make_icosphere(1), 3), Error); }

TEST(Dome, FaceCountAndInwardRays) {
  const int s = 6;
  const TriMesh dome = enclose_dome(TriMesh{}, 10.0, 0.0, s);
  EXPECT_EQ(dome.faces.size(), dome_face_count(s));
  EXPECT_EQ(dome_face_count(s), 8u * s * s);
  const MeshReport rep = validate_mesh(dome);
  EXPECT_EQ(rep.boundary_edges, 0u);
  EXPECT_EQ(rep.non_manifold_edges, 0u);

  const Bvh bvh(dome);
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    Vec3 d = random_unit(rng);
    if (d.y() < 0.05) d.y() = -d.y() + 0.05;
    d.normalize();
    const auto hit = bvh.first_hit(Ray{Vec3(0.0, 1e-3, 0.0), d});
    ASSERT_TRUE(hit.has_value());
    EXPECT_NEAR(hit->t, 10.0, 0.2);
    // Normals face the centre.
    EXPECT_LT(dome.face_normal(hit->face).dot(d), 0.0);
  }
  const auto floor = bvh.first_hit(Ray{Vec3(1.0, 4.0, -2.0), Vec3(0.0, -1.0, 0.0)});
  ASSERT_TRUE(floor.has_value());
  EXPECT_EQ(floor->point.y(), 0.0);
  EXPECT_GT(dome.face_normal(floor->face).y(), 0.0);
}

TEST(Dome, AppendsToMeshAndChecksRadius) {
  const TriMesh sphere = make_icosphere(2, 1.0, Vec3(0.0, 1.0, 0.0));
  const TriMesh out = enclose_dome(sphere, 5.0, 0.0, 4);
  EXPECT_EQ(out.faces.size(), sphere.faces.size() + dome_face_count(4));
  EXPECT_EQ(validate_mesh(out).components, 2u);
  EXPECT_THROW(enclose_dome(sphere, 1.5, 0.0, 4), Error);
}

TEST(Intersection, AxisAlignedTriangle) {
  const Vec3 a(-1, -1, 1), b(2, -1, 1), c(-1, 2, 1);
  const Ray ray{Vec3::Zero(), Vec3(0, 0, 1)};
  const auto h = intersect_triangle(ray, a, b, c);
  ASSERT_TRUE(h.has_value());
  EXPECT_NEAR(h->first, 1.0, 1e-12);
  const auto& w = h->second;
  EXPECT_NEAR(w[0], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(w[1], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(w[2], 1.0 / 3.0, 1e-12);
  const Vec3 p = w[0] * a + w[1] * b + w[2] * c;
  EXPECT_NEAR((p - Vec3(0, 0, 1)).norm(), 0.0, 1e-12);

  TriMesh m;
  m.vertices = {a, b, c};
  m.faces = {{0, 1, 2}};
  const Bvh bvh(m);
  ASSERT_EQ(bvh.nodes().size(), 1u);
  EXPECT_TRUE(bvh.nodes()[0].leaf());
  EXPECT_FALSE(bvh.first_hit(Ray{Vec3::Zero(), Vec3(0, 0, -1)}).has_value());
  const auto hit = bvh.first_hit(ray);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->face, 0u);
  EXPECT_NEAR((hit->point - Vec3(0, 0, 1)).norm(), 0.0, 1e-12);
}

TEST(Intersection, SharedEdgeIsWatertight) {
  // Two triangles sharing the diagonal; rays exactly through the diagonal
  // must hit one of them.
  TriMesh m;
  m.vertices = {Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(1, 1, 1), Vec3(0, 1, 1)};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  const Bvh bvh(m);
  for (int i = 1; i < 100; ++i) {
    const double s = i / 100.0;
    const Vec3 target(s, s, 1.0);
    const Vec3 origin(0.3, -0.2, -0.5);
    const auto hit = bvh.first_hit(Ray{origin, (target - origin).normalized()});
    ASSERT_TRUE(hit.has_value()) << s;
  }
}

TEST(Intersection, EqualTiesPickLowerFace) {
  TriMesh m;
  m.vertices = {Vec3(-1, -1, 2), Vec3(1, -1, 2), Vec3(0, 1, 2)};
  m.faces = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  const Bvh bvh(m);
  const auto hit = bvh.first_hit(Ray{Vec3::Zero(), Vec3(0, 0, 1)});
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->face, 0u);
}

TEST(Bvh, MatchesBruteForceAndContainsChildren) {
  const TriMesh m = decimate(make_icosphere(4), 5000).mesh;
  const Bvh bvh(m);
  std::vector<int> seen(m.faces.size(), 0);
  for (const auto& node : bvh.nodes()) {
    if (node.leaf()) {
      EXPECT_LE(node.count, Bvh::kLeafSize);
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t f = bvh.face_order()[i];
        ++seen[f];
        for (std::uint32_t v : m.faces[f]) {
          Aabb point;
          point.expand(m.vertices[v]);
          EXPECT_TRUE(node.box.contains(point));
        }
      }
    } else {
      EXPECT_TRUE(node.box.contains(bvh.nodes()[node.first].box));
      EXPECT_TRUE(node.box.contains(bvh.nodes()[node.right].box));
    }
  }
  for (int s : seen) EXPECT_EQ(s, 1);

  Rng rng(21);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const Vec3 origin = 2.0 * random_unit(rng);
    const Vec3 aim(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2));
    const Ray ray{origin, (aim - origin).normalized()};
    const auto a = bvh.first_hit(ray);
    const auto b = bvh.first_hit_brute_force(ray);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (!a) continue;
    ++hits;
    EXPECT_EQ(a->face, b->face);
    EXPECT_NEAR(a->t, b->t, 1e-6);
    const auto& w = a->barycentric;
    EXPECT_NEAR(w[0] + w[1] + w[2], 1.0, 1e-6);
    EXPECT_GE(std::min({w[0], w[1], w[2]}), -1e-9);
    EXPECT_GT(a->t, 0.0);
    EXPECT_NEAR((a->point - ray.at(a->t)).norm(), 0.0, 1e-6);
  }
  EXPECT_GT(hits, 1000);
}

TEST(Bvh, DeterministicConstruction) {
  const TriMesh m = make_icosphere(3);
  const Bvh a(m);
  const Bvh b(m);
  EXPECT_EQ(a.face_order(), b.face_order());
  EXPECT_THROW(Bvh(TriMesh{}), Error);
}

TEST(Validate, Basics) {
  TriMesh tri;
  tri.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  tri.faces = {{0, 1, 2}};
  const MeshReport r = validate_mesh(tri);
  EXPECT_EQ(r.boundary_edges, 3u);
  EXPECT_EQ(r.components, 1u);
  EXPECT_EQ(validate_mesh(make_icosphere(2)).boundary_edges, 0u);

  tri.vertices.push_back(Vec3(2, 0, 0));
  tri.faces.push_back({0, 1, 3});  // collinear: degenerate
  EXPECT_EQ(validate_mesh(tri).degenerate_faces, 1u);

  TriMesh fan;
  fan.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1)};
  fan.faces = {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}};
  EXPECT_EQ(validate_mesh(fan).non_manifold_edges, 1u);
}

TEST(Obj, RoundTrip) {
  TriMesh m = make_icosphere(1);
  const TriMesh back = decode_obj(encode_obj(m));
  EXPECT_EQ(back.faces, m.faces);
  ASSERT_EQ(back.vertices.size(), m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) EXPECT_EQ(back.vertices[i], m.vertices[i]);

  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    m.corner_uv.push_back({Vec2(0.25, 0.5), Vec2(0.125, 0.75), Vec2(f / 128.0, 1.0)});
  }
  const TriMesh with_uv = decode_obj(encode_obj(m));
  ASSERT_EQ(with_uv.corner_uv.size(), m.faces.size());
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    for (int c = 0; c < 3; ++c) EXPECT_EQ(with_uv.corner_uv[f][c], m.corner_uv[f][c]);
  }
  EXPECT_EQ(encode_obj(with_uv), encode_obj(m));
}

TEST(Obj, ParsesPolygonsAndNegativeIndices) {
  const TriMesh m = decode_obj("# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf -4 -3 -2 -1\n");
  ASSERT_EQ(m.faces.size(), 2u);
  EXPECT_EQ(m.faces[0], (Face{0, 1, 2}));
  EXPECT_EQ(m.faces[1], (Face{0, 2, 3}));
  EXPECT_THROW(decode_obj("v 0 0 0\nf 1 2 3\n"), Error);
  EXPECT_THROW(decode_obj("v 0 0 zero\n"), Error);
}

}  // namespace
}  // namespace rerend
