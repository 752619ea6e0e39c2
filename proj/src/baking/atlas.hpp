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
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rerend {

enum class AtlasRole { kU, kV, kW, kBeta, kRgb };

/// Manifest / file key of a role ("m_u", "m_v", "m_w", "m_beta", "rgb").
const char* atlas_role_key(AtlasRole role);

/// D planes of width x height values, stored plane-major:
/// value(c, x, y) = data[(c * height + y) * width + x].
template <typename T>
struct ChannelAtlas {
  int channels = 0;
  int width = 0;
  int height = 0;
  AtlasRole role = AtlasRole::kU;
  std::vector<T> data;

  ChannelAtlas() = default;
  ChannelAtlas(int c, int w, int h, AtlasRole r)
      : channels(c), width(w), height(h), role(r),
        data(static_cast<std::size_t>(c) * static_cast<std::size_t>(w) * static_cast<std::size_t>(h), T{}) {}

  std::size_t plane_size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  T& at(int c, int x, int y) { return data[static_cast<std::size_t>(c) * plane_size() + static_cast<std::size_t>(y) * width + x]; }
  const T& at(int c, int x, int y) const {
    return data[static_cast<std::size_t>(c) * plane_size() + static_cast<std::size_t>(y) * width + x];
  }
};

using FloatAtlas = ChannelAtlas<float>;
using ByteAtlas = ChannelAtlas<std::uint8_t>;

/// Per-channel (min, max); dequantize(q) = min + (q / 255) (max - min).
struct QuantParams {
  std::vector<std::pair<float, float>> range;
};

struct QuantizedAtlas {
  ByteAtlas atlas;
  QuantParams quant;
};

/// Per-channel min-max quantization over the pixels flagged in `used`
/// (empty = all pixels). Unused pixels are written as 0. A constant channel
/// records max = min + 1 so that it dequantizes exactly to min.
QuantizedAtlas quantize_atlas(const FloatAtlas& atlas, std::span<const std::uint8_t> used = {});

double dequantize(std::uint8_t q, const std::pair<float, float>& range);

/// Dequantized copy of a whole atlas.
FloatAtlas dequantize_atlas(const QuantizedAtlas& q);

/// rows x cols grid used to tile D = 4 * rows * cols channels: rows is the
/// largest divisor of D/4 not exceeding sqrt(D/4).
std::pair<int, int> channel_grid(int channels);

/// One RGBA PNG of (cols * width) x (rows * height) pixels; grid cell
/// (r, c) carries channels 4 (r cols + c) .. +3 in RGBA order.
std::vector<std::uint8_t> encode_channel_tiled_png(const ByteAtlas& atlas);

ByteAtlas decode_channel_tiled_png(std::span<const std::uint8_t> bytes, int channels, int width, int height,
                                   AtlasRole role, const std::string& what = "atlas PNG");

}  // namespace rerend
