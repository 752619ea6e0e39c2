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

#include "common/png_io.hpp"

#include <png.h>

#include <cstring>

#include "common/error.hpp"

namespace rerend {

namespace {

png_uint_32 format_for(int channels) { return channels == 4 ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB; }

}  // namespace

std::vector<std::uint8_t> encode_png(const PngImage& image) {
  require(image.channels == 3 || image.channels == 4, "PNG images must be RGB or RGBA");
  require(image.width >= 1 && image.height >= 1, "PNG images must be nonempty");
  require(image.pixels.size() == static_cast<std::size_t>(image.width) * image.height * image.channels,
          "PNG pixel buffer size does not match its dimensions");
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = format_for(image.channels);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, image.pixels.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    fail(ErrorKind::kIo, "PNG encoding failed: " + msg);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, image.pixels.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    fail(ErrorKind::kIo, "PNG encoding failed: " + msg);
  }
  out.resize(size);
  return out;
}

PngImage decode_png(std::span<const std::uint8_t> bytes, int channels, const std::string& what) {
  require(channels == 3 || channels == 4, "PNG images must be RGB or RGBA");
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    const std::string msg = img.message;
    png_image_free(&img);
    fail(ErrorKind::kDecode, what + ": not a readable PNG (" + msg + ")");
  }
  if (img.format != format_for(channels)) {
    png_image_free(&img);
    fail(ErrorKind::kDecode, what + ": expected an 8-bit " + (channels == 4 ? "RGBA" : "RGB") + " PNG");
  }
  PngImage out;
  out.width = static_cast<int>(img.width);
  out.height = static_cast<int>(img.height);
  out.channels = channels;
  out.pixels.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    fail(ErrorKind::kDecode, what + ": PNG data is corrupt (" + msg + ")");
  }
  return out;
}

}  // namespace rerend
