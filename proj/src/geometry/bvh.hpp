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
#include <optional>
#include <vector>

#include "geometry/mesh.hpp"

namespace rerend {

/// First intersection of a ray with a mesh.
struct Hit {
  std::uint32_t face = 0;
  std::array<double, 3> barycentric{};  // weights of the face's vertices 0, 1, 2
  double t = 0.0;
  Vec3 point = Vec3::Zero();
};

/// Watertight ray/triangle test (shear-and-scale formulation with edge
/// functions in double precision). Returns t and the barycentric weights;
/// nullopt on a miss, a degenerate determinant (|det| < 1e-9) or t <= 0.
std::optional<std::pair<double, std::array<double, 3>>> intersect_triangle(const Ray& ray,
                                                                           const Vec3& v0,
                                                                           const Vec3& v1,
                                                                           const Vec3& v2);

/// Binary BVH over a mesh's faces, median split on the longest centroid
/// axis, at most kLeafSize faces per leaf. Immutable after construction;
/// first_hit may be called concurrently.
class Bvh {
 public:
  static constexpr std::size_t kLeafSize = 4;

  struct Node {
    Aabb box;
    std::uint32_t first = 0;  // leaf: offset into face_order; inner: index of the left child
    std::uint32_t count = 0;  // faces in a leaf, 0 for inner nodes (right child = left + 1 is not assumed)
    std::uint32_t right = 0;  // inner: index of the right child
    bool leaf() const { return count > 0; }
  };

  explicit Bvh(TriMesh mesh);

  /// Nearest hit with t > 0; equal-t ties go to the lower face index.
  std::optional<Hit> first_hit(const Ray& ray) const;

  /// Reference answer: tests every face.
  std::optional<Hit> first_hit_brute_force(const Ray& ray) const;

  const TriMesh& mesh() const { return mesh_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& face_order() const { return order_; }

 private:
  std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids);
  void test_face(const Ray& ray, std::uint32_t face, std::optional<Hit>& best) const;

  TriMesh mesh_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
};

}  // namespace rerend
