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

#include <cstdint>
#include <vector>

#include "common/math.hpp"

namespace rerend {

struct Intrinsics {
  double focal = 1.0;  // pixels
  double cx = 0.0;     // principal point, pixels
  double cy = 0.0;
  int width = 1;
  int height = 1;

  static Intrinsics from_fov(int width, int height, double fov_x_degrees);
};

/// Pinhole camera. Camera frame: x right, y down, z forward; `rotation`
/// maps camera-frame vectors to world and has determinant +1.
struct Camera {
  Mat3 rotation = Mat3::Identity();
  Vec3 position = Vec3::Zero();
  Intrinsics intrinsics;

  /// Camera at `eye` looking at `target`, rolled so that world +y is up in
  /// the image (world +z when looking straight along y).
  static Camera look_at(const Vec3& eye, const Vec3& target, const Intrinsics& intrinsics);

  /// Camera on a sphere around `target` at the given elevation (degrees
  /// above the xz-plane) and azimuth (degrees, from +x towards +z).
  static Camera orbit(const Vec3& target, double radius, double elevation_deg,
                      double azimuth_deg, const Intrinsics& intrinsics);

  /// Ray through the center of pixel (x, y), x right, y down.
  Ray pixel_ray(int x, int y) const;
};

struct BoundingSphere {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

/// n cameras with origins uniform on the sphere, all looking at its
/// center. Deterministic for a fixed seed.
std::vector<Camera> sample_camera_poses(int n, const BoundingSphere& bounds, std::uint64_t seed,
                                        const Intrinsics& intrinsics);

}  // namespace rerend
