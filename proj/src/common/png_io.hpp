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
#include <vector>

namespace rerend {

struct PngImage {
  int width = 0;
  int height = 0;
  int channels = 4;  // 3 (RGB) or 4 (RGBA)
  std::vector<std::uint8_t> pixels;  // row-major, interleaved, top row first
};

/// Lossless, non-interlaced 8-bit PNG.
std::vector<std::uint8_t> encode_png(const PngImage& image);

/// Decodes an 8-bit PNG whose stored format is exactly RGBA (or RGB when
/// channels == 3). `what` names the source in error messages.
PngImage decode_png(std::span<const std::uint8_t> bytes, int channels, const std::string& what);

}  // namespace rerend
