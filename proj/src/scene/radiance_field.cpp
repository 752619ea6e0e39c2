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

#include "scene/radiance_field.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace rerend {

std::optional<double> RadianceField::surface_hit(const Ray&) const { return std::nullopt; }

std::optional<std::pair<double, double>> intersect_box(const Ray& ray, const Aabb& box) {
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    const double o = ray.origin[a];
    const double d = ray.direction[a];
    if (d == 0.0) {
      if (o < box.lo[a] || o > box.hi[a]) return std::nullopt;
      continue;
    }
    double ta = (box.lo[a] - o) / d;
    double tb = (box.hi[a] - o) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return std::make_pair(t0, t1);
}

// ---------------------------------------------------------------------------

HomogeneousSlab::HomogeneousSlab(double sigma, Rgb color, double y_lo, double y_hi)
    : sigma_(sigma), color_(std::move(color)), y_lo_(y_lo), y_hi_(y_hi) {
  require(sigma >= 0.0, "slab density must be nonnegative");
  require(y_lo <= y_hi, "slab bounds are inverted");
}

double HomogeneousSlab::density(const Vec3& p) const {
  return (p.y() >= y_lo_ && p.y() <= y_hi_) ? sigma_ : 0.0;
}

Rgb HomogeneousSlab::color(const Vec3&, const Vec3&) const { return color_; }

Aabb HomogeneousSlab::bounds() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return Aabb{Vec3(-inf, y_lo_, -inf), Vec3(inf, y_hi_, inf)};
}

std::optional<double> HomogeneousSlab::surface_hit(const Ray& ray) const {
  if (density(ray.origin) > 0.0) return 0.0;
  const double dy = ray.direction.y();
  if (dy == 0.0) return std::nullopt;
  const double plane = ray.origin.y() < y_lo_ ? y_lo_ : y_hi_;
  const double t = (plane - ray.origin.y()) / dy;
  if (t <= 0.0 || !std::isfinite(t)) return std::nullopt;
  return t;
}

// ---------------------------------------------------------------------------

TexturedSphere::TexturedSphere(Vec3 center, double radius, SphereMaterial material,
                               double sigma_max, double edge_width)
    : center_(std::move(center)),
      radius_(radius),
      material_(std::move(material)),
      sigma_max_(sigma_max),
      edge_width_(edge_width) {
  require(radius > 0.0, "sphere radius must be positive");
  require(sigma_max > 0.0 && edge_width > 0.0, "sphere density profile must be positive");
  material_.light_direction.normalize();
}

double TexturedSphere::density(const Vec3& p) const {
  const double r = (p - center_).norm();
  return sigma_max_ * sigmoid((radius_ - r) / edge_width_);
}

Aabb TexturedSphere::bounds() const {
  // Density is below 1e-8 * sigma_max beyond 18.5 edge widths.
  const double reach = radius_ + 20.0 * edge_width_;
  return Aabb{Vec3(center_.array() - reach), Vec3(center_.array() + reach)};
}

Rgb TexturedSphere::diffuse_color(const Vec3& p) const {
  Vec3 n = p - center_;
  const double len = n.norm();
  n = len > 0.0 ? Vec3(n / len) : Vec3::UnitY();
  const Rgb albedo(0.55 + 0.30 * std::sin(3.0 * n.x() + 1.0),
                   0.50 + 0.30 * std::cos(2.5 * n.y() + 2.0 * n.z()),
                   0.45 + 0.25 * std::sin(2.0 * n.z() - 1.5 * n.x()));
  const double lambert = std::max(0.0, n.dot(material_.light_direction));
  return (albedo * (material_.ambient + material_.diffuse * lambert)).cwiseMax(0.0).cwiseMin(1.0);
}

Rgb TexturedSphere::color(const Vec3& p, const Vec3& direction) const {
  Vec3 n = p - center_;
  const double len = n.norm();
  n = len > 0.0 ? Vec3(n / len) : Vec3::UnitY();
  Rgb c = diffuse_color(p);
  const double ndotl = n.dot(material_.light_direction);
  if (ndotl > 0.0 && material_.specular > 0.0) {
    const Vec3 reflected = 2.0 * ndotl * n - material_.light_direction;
    const double rv = std::max(0.0, -reflected.dot(direction));
    c.array() += material_.specular * std::pow(rv, material_.shininess);
  }
  return c.cwiseMax(0.0).cwiseMin(1.0);
}

std::optional<double> TexturedSphere::surface_hit(const Ray& ray) const {
  const Vec3 oc = ray.origin - center_;
  const double b = oc.dot(ray.direction);
  const double c = oc.squaredNorm() - radius_ * radius_;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  const double t0 = -b - s;
  if (t0 > 0.0) return t0;
  const double t1 = -b + s;
  if (t1 > 0.0) return t1;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

BoxGrid::BoxGrid(Aabb box, double sigma, double cell_size, Rgb color_a, Rgb color_b)
    : box_(std::move(box)),
      sigma_(sigma),
      cell_size_(cell_size),
      color_a_(std::move(color_a)),
      color_b_(std::move(color_b)) {
  require(!box_.empty(), "box grid needs a non-empty box");
  require(sigma >= 0.0 && cell_size > 0.0, "box grid density/cell size out of range");
}

double BoxGrid::density(const Vec3& p) const {
  const bool inside = (p.array() >= box_.lo.array()).all() && (p.array() <= box_.hi.array()).all();
  return inside ? sigma_ : 0.0;
}

Rgb BoxGrid::color(const Vec3& p, const Vec3&) const {
  const Vec3 rel = (p - box_.lo) / cell_size_;
  const long parity = static_cast<long>(std::floor(rel.x())) + static_cast<long>(std::floor(rel.y())) +
                      static_cast<long>(std::floor(rel.z()));
  return (parity & 1) ? color_b_ : color_a_;
}

std::optional<double> BoxGrid::surface_hit(const Ray& ray) const {
  const auto span = intersect_box(ray, box_);
  if (!span) return std::nullopt;
  if (span->first <= 0.0) return std::nullopt;
  return span->first;
}

}  // namespace rerend
