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
#include <optional>
#include <span>
#include <vector>

#include "baking/package.hpp"
#include "field/field.hpp"
#include "geometry/bvh.hpp"
#include "render/image.hpp"
#include "scene/camera.hpp"

namespace rerend {

enum class DirectionFetch { kNearest, kBilinear };
enum class BaselineMode { kOff, kRgbNormal };

struct RenderConfig {
  /// Overrides the manifest background when set.
  std::optional<Rgb> background;
  DirectionFetch direction_fetch = DirectionFetch::kNearest;
  /// Must agree with the package variant: kOff for factorized packages,
  /// kRgbNormal for the RGB-textured baseline.
  BaselineMode baseline = BaselineMode::kOff;
};

/// What a primary ray sees in a package: the texel pixel and direction
/// cell it fetched, and the resulting color.
struct Fragment {
  std::size_t face = 0;
  PixelCoord texel;
  int dir_elev = 0;  // nearest cell; the lower corner in bilinear mode
  int dir_azim = 0;
  Rgb color = Rgb::Zero();
};

/// CPU equivalent of the viewer's fragment shader. Atlases are dequantized
/// once at construction; a renderer is immutable afterwards and safe to use
/// from several threads.
class PackageRenderer {
 public:
  explicit PackageRenderer(const AssetPackage& pkg);

  /// Renders from unquantized atlases laid out like the package's (same
  /// order and sizes). Used to isolate the quantization error.
  PackageRenderer(const AssetPackage& pkg, std::span<const FloatAtlas> atlases);

  std::optional<Fragment> trace(const Ray& ray, const RenderConfig& cfg = {}) const;
  ImageBuffer render(const Camera& camera, const RenderConfig& cfg = {}) const;

  /// Value of channel c at pixel (x, y) of atlas k, as used for shading.
  double value(std::size_t k, int c, int x, int y) const;

  const AssetPackage& package() const { return pkg_; }
  const Bvh& bvh() const { return bvh_; }

 private:
  struct Table {
    int channels = 0;
    int width = 0;
    int height = 0;
    std::vector<double> data;  // pixel-major: (y * width + x) * channels + c
    const double* pixel(int x, int y) const {
      return data.data() + (static_cast<std::size_t>(y) * width + x) * channels;
    }
  };

  void check(const RenderConfig& cfg) const;
  Vector fetch_beta(const Vec3& direction, DirectionFetch mode, int& elev, int& azim) const;

  AssetPackage pkg_;
  Bvh bvh_;
  std::vector<Table> tables_;
};

/// Convenience wrapper: builds a PackageRenderer and renders one view.
ImageBuffer render(const AssetPackage& pkg, const Camera& camera, const RenderConfig& cfg = {});

/// Pre-discretization reference: the field evaluated at the exact first
/// hit and ray direction, background on a miss.
ImageBuffer render_float(const FactorizedField& field, const Bvh& bvh, const Camera& camera,
                         const Rgb& background = Rgb::Ones());

/// Nearest (elevation, azimuth) grid cell of a unit direction.
std::array<int, 2> nearest_direction_cell(const DirectionGrid& grid, const Vec3& direction);

}  // namespace rerend
