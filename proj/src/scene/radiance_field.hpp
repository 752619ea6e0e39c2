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

#include <optional>

#include "common/math.hpp"

namespace rerend {

/// Ground-truth scene description: density sigma(p) >= 0 in 1/unit-length
/// and emitted color c(p, d) in [0,1]^3. Implementations are immutable and
/// safe to evaluate from any number of threads.
class RadianceField {
 public:
  virtual ~RadianceField() = default;

  virtual double density(const Vec3& p) const = 0;
  virtual Rgb color(const Vec3& p, const Vec3& direction) const = 0;

  /// Box outside of which density is zero.
  virtual Aabb bounds() const = 0;

  /// Distance to the first point of the scene's hard surface, for fields
  /// whose surface is known in closed form. nullopt on a miss or when the
  /// field has no such surface (see has_surface).
  virtual std::optional<double> surface_hit(const Ray& ray) const;
  virtual bool has_surface() const { return false; }
};

/// Constant density and color inside y in [y_lo, y_hi] (unbounded by
/// default), zero density outside.
class HomogeneousSlab final : public RadianceField {
 public:
  HomogeneousSlab(double sigma, Rgb color,
                  double y_lo = -std::numeric_limits<double>::infinity(),
                  double y_hi = std::numeric_limits<double>::infinity());

  double density(const Vec3& p) const override;
  Rgb color(const Vec3& p, const Vec3& direction) const override;
  Aabb bounds() const override;
  std::optional<double> surface_hit(const Ray& ray) const override;
  bool has_surface() const override { return true; }

  double sigma() const { return sigma_; }
  const Rgb& slab_color() const { return color_; }

 private:
  double sigma_;
  Rgb color_;
  double y_lo_;
  double y_hi_;
};

/// Shading parameters of TexturedSphere.
struct SphereMaterial {
  Vec3 light_direction = Vec3(0.45, 0.8, 0.4).normalized();  // towards the light
  double ambient = 0.35;
  double diffuse = 0.6;
  double specular = 0.45;
  double shininess = 12.0;
};

/// Sphere with a smooth procedural albedo, Lambertian shading and a Phong
/// specular lobe (the view-dependent part). Density is a steep sigmoid
/// shell, sigma_max * Sig((radius - |p - center|) / edge_width), so the
/// half-maximum iso-surface is exactly the sphere.
class TexturedSphere final : public RadianceField {
 public:
  explicit TexturedSphere(Vec3 center = Vec3::Zero(), double radius = 1.0,
                          SphereMaterial material = {}, double sigma_max = 50.0,
                          double edge_width = 0.04);

  double density(const Vec3& p) const override;
  Rgb color(const Vec3& p, const Vec3& direction) const override;
  Aabb bounds() const override;
  std::optional<double> surface_hit(const Ray& ray) const override;
  bool has_surface() const override { return true; }

  /// View-independent part of color() (albedo times diffuse shading).
  Rgb diffuse_color(const Vec3& p) const;

  const Vec3& center() const { return center_; }
  double radius() const { return radius_; }
  const SphereMaterial& material() const { return material_; }

 private:
  Vec3 center_;
  double radius_;
  SphereMaterial material_;
  double sigma_max_;
  double edge_width_;
};

/// Axis-aligned box of constant density with a 3D checkerboard color.
class BoxGrid final : public RadianceField {
 public:
  BoxGrid(Aabb box, double sigma, double cell_size, Rgb color_a, Rgb color_b);

  double density(const Vec3& p) const override;
  Rgb color(const Vec3& p, const Vec3& direction) const override;
  Aabb bounds() const override { return box_; }
  std::optional<double> surface_hit(const Ray& ray) const override;
  bool has_surface() const override { return true; }

 private:
  Aabb box_;
  double sigma_;
  double cell_size_;
  Rgb color_a_;
  Rgb color_b_;
};

/// Entry/exit parameters of a ray against a box (slab test). nullopt when
/// the ray misses or the box lies entirely behind the origin.
std::optional<std::pair<double, double>> intersect_box(const Ray& ray, const Aabb& box);

}  // namespace rerend
