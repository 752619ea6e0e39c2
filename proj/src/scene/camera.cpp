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

#include "scene/camera.hpp"

#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace rerend {

Intrinsics Intrinsics::from_fov(int width, int height, double fov_x_degrees) {
  require(width > 0 && height > 0, "image resolution must be positive");
  require(fov_x_degrees > 0.0 && fov_x_degrees < 180.0, "field of view must be in (0, 180)");
  Intrinsics k;
  k.width = width;
  k.height = height;
  k.focal = 0.5 * width / std::tan(0.5 * fov_x_degrees * kPi / 180.0);
  k.cx = 0.5 * width;
  k.cy = 0.5 * height;
  return k;
}

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Intrinsics& intrinsics) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 up = Vec3::UnitY();
  if (std::abs(forward.dot(up)) > 1.0 - 1e-9) up = Vec3::UnitZ();
  const Vec3 right = forward.cross(up).normalized();
  const Vec3 down = forward.cross(right);
  Camera cam;
  cam.rotation.col(0) = right;
  cam.rotation.col(1) = down;
  cam.rotation.col(2) = forward;
  cam.position = eye;
  cam.intrinsics = intrinsics;
  return cam;
}

Camera Camera::orbit(const Vec3& target, double radius, double elevation_deg, double azimuth_deg,
                     const Intrinsics& intrinsics) {
  const double el = elevation_deg * kPi / 180.0;
  const double az = azimuth_deg * kPi / 180.0;
  const Vec3 offset(std::cos(el) * std::cos(az), std::sin(el), std::cos(el) * std::sin(az));
  return look_at(target + radius * offset, target, intrinsics);
}

Ray Camera::pixel_ray(int x, int y) const {
  const Vec3 d_cam((x + 0.5 - intrinsics.cx) / intrinsics.focal,
                   (y + 0.5 - intrinsics.cy) / intrinsics.focal, 1.0);
  return Ray{position, (rotation * d_cam).normalized()};
}

std::vector<Camera> sample_camera_poses(int n, const BoundingSphere& bounds, std::uint64_t seed,
                                        const Intrinsics& intrinsics) {
  require(n >= 1, "need at least one camera");
  require(bounds.radius > 0.0, "camera sphere radius must be positive");
  Rng rng(seed);
  std::vector<Camera> cameras;
  cameras.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Archimedes: uniform height and azimuth give a uniform sphere point.
    const double h = 1.0 - 2.0 * rng.uniform();
    const double phi = 2.0 * kPi * rng.uniform();
    const double s = std::sqrt(std::max(0.0, 1.0 - h * h));
    const Vec3 dir(s * std::cos(phi), h, s * std::sin(phi));
    cameras.push_back(Camera::look_at(bounds.center + bounds.radius * dir, bounds.center, intrinsics));
  }
  return cameras;
}

}  // namespace rerend
