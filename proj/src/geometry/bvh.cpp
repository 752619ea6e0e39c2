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

#include "geometry/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common/error.hpp"

namespace rerend {

std::optional<std::pair<double, std::array<double, 3>>> intersect_triangle(const Ray& ray,
                                                                           const Vec3& v0,
                                                                           const Vec3& v1,
                                                                           const Vec3& v2) {
  const Vec3& d = ray.direction;
  int kz = 0;
  d.cwiseAbs().maxCoeff(&kz);
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (d[kz] < 0.0) std::swap(kx, ky);

  const double sx = d[kx] / d[kz];
  const double sy = d[ky] / d[kz];
  const double sz = 1.0 / d[kz];

  const Vec3 a = v0 - ray.origin;
  const Vec3 b = v1 - ray.origin;
  const Vec3 c = v2 - ray.origin;
  const double ax = a[kx] - sx * a[kz], ay = a[ky] - sy * a[kz];
  const double bx = b[kx] - sx * b[kz], by = b[ky] - sy * b[kz];
  const double cx = c[kx] - sx * c[kz], cy = c[ky] - sy * c[kz];

  // Edge functions; U weighs v0, V weighs v1, W weighs v2.
  const double u = cx * by - cy * bx;
  const double v = ax * cy - ay * cx;
  const double w = bx * ay - by * ax;
  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return std::nullopt;

  const double det = u + v + w;
  if (std::abs(det) < 1e-9) return std::nullopt;

  const double az = sz * a[kz], bz = sz * b[kz], cz = sz * c[kz];
  const double t = (u * az + v * bz + w * cz) / det;
  if (!(t > 0.0)) return std::nullopt;
  return std::make_pair(t, std::array<double, 3>{u / det, v / det, w / det});
}

Bvh::Bvh(TriMesh mesh) : mesh_(std::move(mesh)) {
  require(!mesh_.faces.empty(), "cannot build a BVH over an empty mesh");
  const auto n = static_cast<std::uint32_t>(mesh_.faces.size());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  std::vector<Vec3> centroids(n);
  for (std::uint32_t f = 0; f < n; ++f) {
    const Face& face = mesh_.faces[f];
    centroids[f] = (mesh_.vertices[face[0]] + mesh_.vertices[face[1]] + mesh_.vertices[face[2]]) / 3.0;
  }
  nodes_.reserve(2 * (n / kLeafSize + 1));
  build(0, n, centroids);
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  Aabb centroid_box;
  for (std::uint32_t i = begin; i < end; ++i) {
    const Face& face = mesh_.faces[order_[i]];
    for (std::uint32_t v : face) box.expand(mesh_.vertices[v]);
    centroid_box.expand(centroids[order_[i]]);
  }
  nodes_[index].box = box;

  if (end - begin <= kLeafSize) {
    nodes_[index].first = begin;
    nodes_[index].count = end - begin;
    return index;
  }

  int axis = 0;
  centroid_box.extent().maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t x, std::uint32_t y) {
                     const double cx = centroids[x][axis];
                     const double cy = centroids[y][axis];
                     return cx < cy || (cx == cy && x < y);
                   });
  const std::uint32_t left = build(begin, mid, centroids);
  const std::uint32_t right = build(mid, end, centroids);
  nodes_[index].first = left;
  nodes_[index].right = right;
  nodes_[index].count = 0;
  return index;
}

void Bvh::test_face(const Ray& ray, std::uint32_t face, std::optional<Hit>& best) const {
  const Face& f = mesh_.faces[face];
  const auto hit =
      intersect_triangle(ray, mesh_.vertices[f[0]], mesh_.vertices[f[1]], mesh_.vertices[f[2]]);
  if (!hit) return;
  const double t = hit->first;
  if (best && (t > best->t || (t == best->t && face > best->face))) return;
  Hit h;
  h.face = face;
  h.t = t;
  h.barycentric = hit->second;
  h.point = h.barycentric[0] * mesh_.vertices[f[0]] + h.barycentric[1] * mesh_.vertices[f[1]] +
            h.barycentric[2] * mesh_.vertices[f[2]];
  best = h;
}

namespace {

// Slab test against a node box; returns the entry distance or +inf.
double box_entry(const Aabb& box, const Vec3& origin, const Vec3& inv_dir, double t_max) {
  double t0 = 0.0;
  double t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    double ta = (box.lo[a] - origin[a]) * inv_dir[a];
    double tb = (box.hi[a] - origin[a]) * inv_dir[a];
    if (std::isnan(ta)) ta = -std::numeric_limits<double>::infinity();
    if (std::isnan(tb)) tb = std::numeric_limits<double>::infinity();
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    // Pad the exit a little so rays grazing a face lying in the box plane
    // are not culled by rounding.
    t1 = std::min(t1, tb * (1.0 + 4e-16) + 1e-300);
    if (t0 > t1) return std::numeric_limits<double>::infinity();
  }
  return t0;
}

}  // namespace

std::optional<Hit> Bvh::first_hit(const Ray& ray) const {
  std::optional<Hit> best;
  const Vec3 inv_dir = ray.direction.cwiseInverse();
  std::array<std::uint32_t, 128> stack;
  std::size_t top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    const double limit = best ? best->t : std::numeric_limits<double>::infinity();
    if (box_entry(node.box, ray.origin, inv_dir, limit) == std::numeric_limits<double>::infinity()) {
      continue;
    }
    if (node.leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) test_face(ray, order_[i], best);
      continue;
    }
    const double tl = box_entry(nodes_[node.first].box, ray.origin, inv_dir, limit);
    const double tr = box_entry(nodes_[node.right].box, ray.origin, inv_dir, limit);
    // Push the farther child first so the nearer one is visited first.
    if (tl <= tr) {
      if (tr != std::numeric_limits<double>::infinity()) stack[top++] = node.right;
      if (tl != std::numeric_limits<double>::infinity()) stack[top++] = node.first;
    } else {
      if (tl != std::numeric_limits<double>::infinity()) stack[top++] = node.first;
      if (tr != std::numeric_limits<double>::infinity()) stack[top++] = node.right;
    }
  }
  return best;
}

std::optional<Hit> Bvh::first_hit_brute_force(const Ray& ray) const {
  std::optional<Hit> best;
  for (std::uint32_t f = 0; f < mesh_.faces.size(); ++f) test_face(ray, f, best);
  return best;
}

}  // namespace rerend
