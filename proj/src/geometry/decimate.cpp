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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "common/error.hpp"
#include "geometry/mesh.hpp"

namespace rerend {

namespace {

using Quadric = Eigen::Matrix4d;

struct Candidate {
  double cost;
  std::uint32_t a;
  std::uint32_t b;
  std::uint64_t stamp_a;
  std::uint64_t stamp_b;
  Vec3 target;

  // Min-heap on cost; ties broken on vertex ids for determinism.
  bool operator<(const Candidate& o) const {
    if (cost != o.cost) return cost > o.cost;
    if (a != o.a) return a > o.a;
    return b > o.b;
  }
};

class Decimator {
 public:
  explicit Decimator(const TriMesh& mesh)
      : pos_(mesh.vertices),
        faces_(mesh.faces),
        face_alive_(mesh.faces.size(), true),
        vert_faces_(mesh.vertices.size()),
        quadric_(mesh.vertices.size(), Quadric::Zero()),
        stamp_(mesh.vertices.size(), 0),
        boundary_(mesh.vertices.size(), false),
        alive_faces_(mesh.faces.size()) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_count;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      for (std::uint32_t v : faces_[f]) vert_faces_[v].push_back(static_cast<std::uint32_t>(f));
      for (int e = 0; e < 3; ++e) ++edge_count[std::minmax(faces_[f][e], faces_[f][(e + 1) % 3])];
      const Vec3 n = face_normal(static_cast<std::uint32_t>(f));
      const double len = n.norm();
      if (len <= 0.0) continue;
      const Vec3 unit = n / len;
      Eigen::Vector4d plane(unit.x(), unit.y(), unit.z(), -unit.dot(pos_[faces_[f][0]]));
      const Quadric k = plane * plane.transpose();
      for (std::uint32_t v : faces_[f]) quadric_[v] += k;
    }
    for (const auto& [edge, count] : edge_count) {
      if (count != 2) boundary_[edge.first] = boundary_[edge.second] = true;
    }
  }

  bool run(std::size_t target_faces) {
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      for (int e = 0; e < 3; ++e) {
        const auto [a, b] = std::minmax(faces_[f][e], faces_[f][(e + 1) % 3]);
        // Each interior edge is seen from both faces; push it once.
        if (faces_[f][e] == a) push(a, b);
      }
    }
    while (alive_faces_ > target_faces) {
      if (heap_.empty()) return false;
      const Candidate c = heap_.top();
      heap_.pop();
      if (stamp_[c.a] != c.stamp_a || stamp_[c.b] != c.stamp_b) continue;
      collapse(c);
    }
    return true;
  }

  TriMesh result() const {
    TriMesh out;
    std::vector<std::int64_t> remap(pos_.size(), -1);
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!face_alive_[f]) continue;
      for (std::uint32_t v : faces_[f]) remap[v] = 0;
    }
    for (std::size_t v = 0; v < pos_.size(); ++v) {
      if (remap[v] < 0) continue;
      remap[v] = static_cast<std::int64_t>(out.vertices.size());
      out.vertices.push_back(pos_[v]);
    }
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!face_alive_[f]) continue;
      out.faces.push_back({static_cast<std::uint32_t>(remap[faces_[f][0]]),
                           static_cast<std::uint32_t>(remap[faces_[f][1]]),
                           static_cast<std::uint32_t>(remap[faces_[f][2]])});
    }
    return out;
  }

 private:
  Vec3 face_normal(std::uint32_t f) const {
    const Face& face = faces_[f];
    return (pos_[face[1]] - pos_[face[0]]).cross(pos_[face[2]] - pos_[face[0]]);
  }

  static double evaluate(const Quadric& q, const Vec3& p) {
    const Eigen::Vector4d h(p.x(), p.y(), p.z(), 1.0);
    return h.dot(q * h);
  }

  void push(std::uint32_t a, std::uint32_t b) {
    if (boundary_[a] || boundary_[b]) return;
    const Quadric q = quadric_[a] + quadric_[b];
    Vec3 best = 0.5 * (pos_[a] + pos_[b]);
    double cost = evaluate(q, best);
    const Mat3 m = q.topLeftCorner<3, 3>();
    const Vec3 rhs = -q.topRightCorner<3, 1>();
    if (std::abs(m.determinant()) > 1e-12) {
      const Vec3 opt = m.partialPivLu().solve(rhs);
      // Keep the optimum only when it stays near the edge.
      const double len = (pos_[a] - pos_[b]).norm();
      if (all_finite(opt) && (opt - best).norm() <= 2.0 * len) {
        const double c = evaluate(q, opt);
        if (c <= cost) {
          cost = c;
          best = opt;
        }
      }
    }
    for (const Vec3& p : {pos_[a], pos_[b]}) {
      const double c = evaluate(q, p);
      if (c < cost) {
        cost = c;
        best = p;
      }
    }
    heap_.push(Candidate{std::max(cost, 0.0), a, b, stamp_[a], stamp_[b], best});
  }

  std::set<std::uint32_t> neighbours(std::uint32_t v) const {
    std::set<std::uint32_t> out;
    for (std::uint32_t f : vert_faces_[v]) {
      if (!face_alive_[f]) continue;
      for (std::uint32_t u : faces_[f]) {
        if (u != v) out.insert(u);
      }
    }
    return out;
  }

  bool flips(std::uint32_t moved, std::uint32_t other, const Vec3& target) const {
    for (std::uint32_t f : vert_faces_[moved]) {
      if (!face_alive_[f]) continue;
      const Face& face = faces_[f];
      if (face[0] == other || face[1] == other || face[2] == other) continue;
      const Vec3 before = face_normal(f);
      std::array<Vec3, 3> p = {pos_[face[0]], pos_[face[1]], pos_[face[2]]};
      for (int k = 0; k < 3; ++k) {
        if (face[k] == moved) p[k] = target;
      }
      const Vec3 after = (p[1] - p[0]).cross(p[2] - p[0]);
      const double la = after.norm();
      const double lb = before.norm();
      if (la <= 1e-12 * std::max(1.0, lb)) return true;
      if (after.dot(before) < 0.2 * la * lb) return true;
    }
    return false;
  }

  void collapse(const Candidate& c) {
    const std::uint32_t a = c.a;
    const std::uint32_t b = c.b;
    const auto na = neighbours(a);
    const auto nb = neighbours(b);
    if (!na.count(b)) return;
    std::size_t shared = 0;
    for (std::uint32_t v : na) shared += nb.count(v);
    // Link condition for an interior manifold edge.
    if (shared != 2) return;
    if (flips(a, b, c.target) || flips(b, a, c.target)) return;

    for (std::uint32_t f : vert_faces_[b]) {
      if (!face_alive_[f]) continue;
      Face& face = faces_[f];
      const bool has_a = face[0] == a || face[1] == a || face[2] == a;
      if (has_a) {
        face_alive_[f] = false;
        --alive_faces_;
        continue;
      }
      for (auto& v : face) {
        if (v == b) v = a;
      }
      vert_faces_[a].push_back(f);
    }
    vert_faces_[b].clear();
    pos_[a] = c.target;
    quadric_[a] += quadric_[b];
    ++stamp_[a];
    ++stamp_[b];

    std::vector<std::uint32_t>& fa = vert_faces_[a];
    fa.erase(std::remove_if(fa.begin(), fa.end(), [&](std::uint32_t f) { return !face_alive_[f]; }),
             fa.end());
    std::sort(fa.begin(), fa.end());
    fa.erase(std::unique(fa.begin(), fa.end()), fa.end());

    for (std::uint32_t n : neighbours(a)) push(std::min(a, n), std::max(a, n));
  }

  std::vector<Vec3> pos_;
  std::vector<Face> faces_;
  std::vector<bool> face_alive_;
  std::vector<std::vector<std::uint32_t>> vert_faces_;
  std::vector<Quadric> quadric_;
  std::vector<std::uint64_t> stamp_;
  std::vector<bool> boundary_;
  std::size_t alive_faces_;
  std::priority_queue<Candidate> heap_;
};

}  // namespace

DecimationResult decimate(const TriMesh& mesh, std::size_t target_faces) {
  require(target_faces >= 4, "decimation target must be at least 4 faces");
  if (target_faces >= mesh.faces.size()) return DecimationResult{mesh, false};
  Decimator d(mesh);
  const bool reached = d.run(target_faces);
  return DecimationResult{d.result(), !reached};
}

}  // namespace rerend
