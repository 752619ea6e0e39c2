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

#include "render/image.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "common/png_io.hpp"

namespace rerend {

ImageBuffer::ImageBuffer(int w, int h, const Rgb& fill) : width(w), height(h) {
  require(w >= 0 && h >= 0, "image dimensions must be non-negative");
  rgb.resize(pixel_count() * 3);
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c) rgb[3 * i + c] = static_cast<float>(fill[c]);
  }
}

Rgb ImageBuffer::at(int x, int y) const {
  const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
  return Rgb(rgb[i], rgb[i + 1], rgb[i + 2]);
}

void ImageBuffer::set(int x, int y, const Rgb& c) {
  const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
  for (int k = 0; k < 3; ++k) rgb[i + k] = static_cast<float>(c[k]);
}

namespace {

void check_same_size(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width != b.width || a.height != b.height) {
    fail(ErrorKind::kDimension, "image sizes differ: " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                                    " vs " + std::to_string(b.width) + "x" + std::to_string(b.height));
  }
}

}  // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  check_same_size(a, b);
  require(!a.rgb.empty(), "psnr needs nonempty images");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rgb.size(); ++i) {
    const double d = static_cast<double>(a.rgb[i]) - b.rgb[i];
    sum += d * d;
  }
  if (sum == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(static_cast<double>(a.rgb.size()) / sum);
}

std::string format_psnr(double db) {
  if (std::isinf(db) && db > 0) return "inf";
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(4);
  s << db;
  return s.str();
}

namespace {

constexpr int kRadius = 5;

std::array<double, 2 * kRadius + 1> gaussian_taps() {
  std::array<double, 2 * kRadius + 1> g{};
  double sum = 0.0;
  for (int k = -kRadius; k <= kRadius; ++k) {
    g[k + kRadius] = std::exp(-0.5 * k * k / (1.5 * 1.5));
    sum += g[k + kRadius];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Separable "valid" Gaussian filter: output is (w - 10) x (h - 10).
std::vector<double> blur_valid(const std::vector<double>& in, int w, int h) {
  static const auto g = gaussian_taps();
  const int ow = w - 2 * kRadius;
  const int oh = h - 2 * kRadius;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k <= 2 * kRadius; ++k) acc += g[k] * in[static_cast<std::size_t>(y) * w + x + k];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k <= 2 * kRadius; ++k) acc += g[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

std::vector<double> luminance(const ImageBuffer& im) {
  std::vector<double> l(im.pixel_count());
  for (std::size_t i = 0; i < l.size(); ++i) {
    l[i] = (static_cast<double>(im.rgb[3 * i]) + im.rgb[3 * i + 1] + im.rgb[3 * i + 2]) / 3.0;
  }
  return l;
}

}  // namespace

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  check_same_size(a, b);
  if (a.width < 2 * kRadius + 1 || a.height < 2 * kRadius + 1) {
    fail(ErrorKind::kDimension, "ssim needs images of at least 11x11 pixels");
  }
  const int w = a.width;
  const int h = a.height;
  const auto x = luminance(a);
  const auto y = luminance(b);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = blur_valid(x, w, h);
  const auto my = blur_valid(y, w, h);
  const auto sxx = blur_valid(xx, w, h);
  const auto syy = blur_valid(yy, w, h);
  const auto sxy = blur_valid(xy, w, h);
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    total += ((2 * mx[i] * my[i] + c1) * (2 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mx.size());
}

void write_png_rgb8(const std::filesystem::path& path, const ImageBuffer& image) {
  PngImage png{image.width, image.height, 3, std::vector<std::uint8_t>(image.rgb.size())};
  for (std::size_t i = 0; i < image.rgb.size(); ++i) {
    const double v = std::clamp(static_cast<double>(image.rgb[i]), 0.0, 1.0);
    png.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * v));
  }
  write_file_bytes(path, encode_png(png));
}

ImageBuffer read_png_rgb8(const std::filesystem::path& path) {
  const PngImage png = decode_png(read_file_bytes(path), 3, path.filename().string());
  ImageBuffer out(png.width, png.height);
  for (std::size_t i = 0; i < png.pixels.size(); ++i) out.rgb[i] = static_cast<float>(png.pixels[i] / 255.0);
  return out;
}

void write_pfm(const std::filesystem::path& path, const ImageBuffer& image) {
  static_assert(std::endian::native == std::endian::little, "PFM writer assumes a little-endian host");
  const std::string header = "PF\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n-1.0\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  const std::size_t row = static_cast<std::size_t>(image.width) * 3;
  for (int y = image.height - 1; y >= 0; --y) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(image.rgb.data() + static_cast<std::size_t>(y) * row);
    bytes.insert(bytes.end(), p, p + row * sizeof(float));
  }
  write_file_bytes(path, bytes);
}

ImageBuffer read_pfm(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const std::string name = path.filename().string();
  // Header: three whitespace-terminated tokens.
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) ++pos;
    if (start == pos) fail(ErrorKind::kDecode, name + ": truncated PFM header");
    return std::string(bytes.begin() + static_cast<std::ptrdiff_t>(start), bytes.begin() + static_cast<std::ptrdiff_t>(pos));
  };
  if (token() != "PF") fail(ErrorKind::kDecode, name + ": not an RGB PFM file");
  int w = 0, h = 0;
  double scale = 0.0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    scale = std::stod(token());
  } catch (const std::exception&) {
    fail(ErrorKind::kDecode, name + ": malformed PFM header");
  }
  ++pos;  // single whitespace byte before the raster
  if (scale >= 0.0) fail(ErrorKind::kDecode, name + ": big-endian PFM is not supported");
  if (w < 0 || h < 0) fail(ErrorKind::kDecode, name + ": negative PFM dimensions");
  ImageBuffer out(w, h);
  const std::size_t row = static_cast<std::size_t>(w) * 3;
  if (bytes.size() - std::min(pos, bytes.size()) != out.rgb.size() * sizeof(float)) {
    fail(ErrorKind::kDecode, name + ": PFM raster has the wrong size");
  }
  for (int y = h - 1, k = 0; y >= 0; --y, ++k) {
    std::memcpy(out.rgb.data() + static_cast<std::size_t>(y) * row, bytes.data() + pos + k * row * sizeof(float),
                row * sizeof(float));
  }
  return out;
}

}  // namespace rerend
