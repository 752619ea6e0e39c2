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

#include "baking/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/error.hpp"
#include "common/png_io.hpp"

namespace rerend {

const char* atlas_role_key(AtlasRole role) {
  switch (role) {
    case AtlasRole::kU:
      return "m_u";
    case AtlasRole::kV:
      return "m_v";
    case AtlasRole::kW:
      return "m_w";
    case AtlasRole::kBeta:
      return "m_beta";
    case AtlasRole::kRgb:
      return "rgb";
  }
  return "?";
}

QuantizedAtlas quantize_atlas(const FloatAtlas& atlas, std::span<const std::uint8_t> used) {
  const std::size_t plane = atlas.plane_size();
  require(used.empty() || used.size() == plane, "quantization mask does not match the atlas size");
  QuantizedAtlas out;
  out.atlas = ByteAtlas(atlas.channels, atlas.width, atlas.height, atlas.role);
  out.quant.range.resize(static_cast<std::size_t>(atlas.channels));
  for (int c = 0; c < atlas.channels; ++c) {
    const float* src = atlas.data.data() + static_cast<std::size_t>(c) * plane;
    float lo = std::numeric_limits<float>::infinity();
    float hi = -std::numeric_limits<float>::infinity();
    for (std::size_t i = 0; i < plane; ++i) {
      if (!used.empty() && !used[i]) continue;
      if (!std::isfinite(src[i])) fail(ErrorKind::kNumeric, "cannot quantize a non-finite atlas value");
      lo = std::min(lo, src[i]);
      hi = std::max(hi, src[i]);
    }
    if (lo > hi) {  // no used pixel at all
      lo = 0.0f;
      hi = 1.0f;
    }
    if (!(hi > lo)) {
      hi = lo + 1.0f;
      if (!(hi > lo)) hi = std::nextafter(lo, std::numeric_limits<float>::infinity());
    }
    out.quant.range[static_cast<std::size_t>(c)] = {lo, hi};
    const double scale = 255.0 / (static_cast<double>(hi) - static_cast<double>(lo));
    std::uint8_t* dst = out.atlas.data.data() + static_cast<std::size_t>(c) * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      if (!used.empty() && !used[i]) continue;
      const double q = std::round((static_cast<double>(src[i]) - lo) * scale);
      dst[i] = static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
    }
  }
  return out;
}

double dequantize(std::uint8_t q, const std::pair<float, float>& range) {
  const double lo = range.first;
  const double hi = range.second;
  return lo + (static_cast<double>(q) / 255.0) * (hi - lo);
}

FloatAtlas dequantize_atlas(const QuantizedAtlas& q) {
  FloatAtlas out(q.atlas.channels, q.atlas.width, q.atlas.height, q.atlas.role);
  const std::size_t plane = q.atlas.plane_size();
  for (int c = 0; c < q.atlas.channels; ++c) {
    const auto& range = q.quant.range[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < plane; ++i) {
      const std::size_t k = static_cast<std::size_t>(c) * plane + i;
      out.data[k] = static_cast<float>(dequantize(q.atlas.data[k], range));
    }
  }
  return out;
}

std::pair<int, int> channel_grid(int channels) {
  if (channels < 4 || channels % 4 != 0) {
    fail(ErrorKind::kDimension, "channel-tiled PNGs need D divisible by 4 (D = " + std::to_string(channels) + ")");
  }
  const int groups = channels / 4;
  int rows = 1;
  for (int r = 1; r * r <= groups; ++r) {
    if (groups % r == 0) rows = r;
  }
  return {rows, groups / rows};
}

std::vector<std::uint8_t> encode_channel_tiled_png(const ByteAtlas& atlas) {
  const auto [rows, cols] = channel_grid(atlas.channels);
  PngImage img;
  img.width = cols * atlas.width;
  img.height = rows * atlas.height;
  img.channels = 4;
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * 4);
  for (int g = 0; g < rows * cols; ++g) {
    const int cx = (g % cols) * atlas.width;
    const int cy = (g / cols) * atlas.height;
    for (int y = 0; y < atlas.height; ++y) {
      for (int x = 0; x < atlas.width; ++x) {
        std::uint8_t* px = &img.pixels[(static_cast<std::size_t>(cy + y) * img.width + (cx + x)) * 4];
        for (int k = 0; k < 4; ++k) px[k] = atlas.at(4 * g + k, x, y);
      }
    }
  }
  return encode_png(img);
}

ByteAtlas decode_channel_tiled_png(std::span<const std::uint8_t> bytes, int channels, int width, int height,
                                   AtlasRole role, const std::string& what) {
  const auto [rows, cols] = channel_grid(channels);
  const PngImage img = decode_png(bytes, 4, what);
  if (img.width != cols * width || img.height != rows * height) {
    fail(ErrorKind::kDimension, what + ": image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                                    ", expected " + std::to_string(cols * width) + "x" +
                                    std::to_string(rows * height) + " for D = " + std::to_string(channels));
  }
  ByteAtlas atlas(channels, width, height, role);
  for (int g = 0; g < rows * cols; ++g) {
    const int cx = (g % cols) * width;
    const int cy = (g / cols) * height;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const std::uint8_t* px = &img.pixels[(static_cast<std::size_t>(cy + y) * img.width + (cx + x)) * 4];
        for (int k = 0; k < 4; ++k) atlas.at(4 * g + k, x, y) = px[k];
      }
    }
  }
  return atlas;
}

}  // namespace rerend
