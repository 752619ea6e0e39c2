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
#include <filesystem>
#include <span>
#include <vector>

#include "scene/camera.hpp"
#include "scene/radiance_field.hpp"

namespace rerend {

/// One supervised ray, stored in single precision exactly as persisted.
struct PseudoRecord {
  std::array<float, 3> origin;
  std::array<float, 3> direction;
  std::array<float, 3> color;

  Ray ray() const;
  Rgb rgb() const { return Rgb(color[0], color[1], color[2]); }
};

struct PseudoImageMeta {
  std::uint64_t seed = 0;
  int camera_count = 0;
  int width = 0;
  int height = 0;
};

struct PseudoImageSet {
  std::vector<PseudoRecord> records;
  PseudoImageMeta meta;
};

enum class RenderMode { kVolume, kSurface };

struct PseudoImageOptions {
  RenderMode mode = RenderMode::kSurface;
  Rgb background = Rgb::Ones();
  int volume_samples = 256;
  bool jitter = false;
  std::uint64_t seed = 0;  // recorded in the metadata; drives jitter
};

/// Color of a single ray as seen by the oracle: volume quadrature over the
/// field's bounding box composited over the background, or the field color
/// at the analytic first surface hit.
Rgb oracle_ray_color(const RadianceField& field, const Ray& ray, const PseudoImageOptions& options,
                     std::uint64_t ray_index = 0);

/// One record per pixel per camera, cameras in order, pixels row-major.
PseudoImageSet generate_pseudo_images(const RadianceField& field, std::span<const Camera> cameras,
                                      const PseudoImageOptions& options);

/// Flat little-endian file: "RRPS", u32 version, u64 count, then count
/// records of 9 x f32 (origin, direction, color).
inline constexpr std::uint32_t kPseudoFormatVersion = 1;
void write_pseudo_images(const std::filesystem::path& path, const PseudoImageSet& set);
PseudoImageSet read_pseudo_images(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_pseudo_images(const PseudoImageSet& set);
PseudoImageSet decode_pseudo_images(std::span<const std::uint8_t> bytes);

}  // namespace rerend
