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

#include <filesystem>
#include <string>
#include <vector>

#include "common/math.hpp"

namespace rerend {

/// W x H RGB image, f32, row-major with interleaved channels.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<float> rgb;

  ImageBuffer() = default;
  ImageBuffer(int w, int h, const Rgb& fill = Rgb::Zero());

  Rgb at(int x, int y) const;
  void set(int x, int y, const Rgb& c);
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
};

/// 10 log10(1 / MSE) over all channels; +infinity for identical images.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

/// "inf" for infinite PSNR, otherwise the number with four decimals.
std::string format_psnr(double db);

/// Mean SSIM over all fully-contained 11x11 Gaussian windows (sigma 1.5,
/// K1 = 0.01, K2 = 0.03, data range 1) of the per-pixel RGB mean.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

/// 8-bit RGB PNG; values are clamped to [0, 1] and rounded.
void write_png_rgb8(const std::filesystem::path& path, const ImageBuffer& image);
ImageBuffer read_png_rgb8(const std::filesystem::path& path);

/// Portable float map ("PF", little-endian, rows bottom to top).
void write_pfm(const std::filesystem::path& path, const ImageBuffer& image);
ImageBuffer read_pfm(const std::filesystem::path& path);

}  // namespace rerend
