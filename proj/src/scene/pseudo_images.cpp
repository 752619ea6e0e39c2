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

#include "scene/pseudo_images.hpp"

#include <cstring>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "common/parallel.hpp"
#include "common/rng.hpp"
#include "scene/volume.hpp"

namespace rerend {

Ray PseudoRecord::ray() const {
  return Ray{Vec3(origin[0], origin[1], origin[2]),
             Vec3(direction[0], direction[1], direction[2]).normalized()};
}

Rgb oracle_ray_color(const RadianceField& field, const Ray& ray, const PseudoImageOptions& options,
                     std::uint64_t ray_index) {
  if (options.mode == RenderMode::kSurface) {
    require(field.has_surface(), "surface rendering needs a field with an analytic surface");
    const auto t = field.surface_hit(ray);
    if (!t) return options.background;
    return field.color(ray.at(*t), ray.direction).cwiseMax(0.0).cwiseMin(1.0);
  }
  const auto span = intersect_box(ray, field.bounds());
  if (!span || !(span->second > span->first) || !std::isfinite(span->second)) {
    return options.background;
  }
  std::optional<QuadratureJitter> jitter;
  if (options.jitter) jitter = QuadratureJitter{derive_seed(options.seed, "jitter") ^ ray_index};
  const VolumeSample s =
      volume_integrate(field, ray, span->first, span->second, options.volume_samples, jitter);
  return (s.color + s.transmittance * options.background).cwiseMax(0.0).cwiseMin(1.0);
}

PseudoImageSet generate_pseudo_images(const RadianceField& field, std::span<const Camera> cameras,
                                      const PseudoImageOptions& options) {
  require(!cameras.empty(), "pseudo-image generation needs at least one camera");
  const int w = cameras.front().intrinsics.width;
  const int h = cameras.front().intrinsics.height;
  for (const Camera& c : cameras) {
    require(c.intrinsics.width == w && c.intrinsics.height == h,
            "all cameras must share one resolution");
  }
  const std::size_t per_camera = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  PseudoImageSet set;
  set.meta = PseudoImageMeta{options.seed, static_cast<int>(cameras.size()), w, h};
  set.records.resize(per_camera * cameras.size());

  parallel_chunks(set.records.size(), 1024, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Camera& cam = cameras[i / per_camera];
      const std::size_t pix = i % per_camera;
      const Ray ray = cam.pixel_ray(static_cast<int>(pix % w), static_cast<int>(pix / w));
      const Rgb c = oracle_ray_color(field, ray, options, i);
      PseudoRecord& r = set.records[i];
      for (int a = 0; a < 3; ++a) {
        r.origin[a] = static_cast<float>(ray.origin[a]);
        r.direction[a] = static_cast<float>(ray.direction[a]);
        r.color[a] = static_cast<float>(c[a]);
      }
    }
  });
  return set;
}

std::vector<std::uint8_t> encode_pseudo_images(const PseudoImageSet& set) {
  ByteWriter w;
  w.put_bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("RRPS"), 4));
  w.put<std::uint32_t>(kPseudoFormatVersion);
  w.put<std::uint64_t>(set.records.size());
  for (const PseudoRecord& r : set.records) {
    for (float v : r.origin) w.put(v);
    for (float v : r.direction) w.put(v);
    for (float v : r.color) w.put(v);
  }
  return w.bytes();
}

PseudoImageSet decode_pseudo_images(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "pseudo-image file");
  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.get<std::uint8_t>());
  if (std::memcmp(magic, "RRPS", 4) != 0) fail(ErrorKind::kDecode, "pseudo-image file: bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kPseudoFormatVersion) {
    fail(ErrorKind::kVersion, "pseudo-image file: unsupported version " + std::to_string(version));
  }
  const auto count = r.get<std::uint64_t>();
  if (count > r.remaining() / (9 * sizeof(float))) {
    fail(ErrorKind::kDecode, "pseudo-image file: record count exceeds file size");
  }
  PseudoImageSet set;
  set.records.resize(count);
  for (PseudoRecord& rec : set.records) {
    for (float& v : rec.origin) v = r.get<float>();
    for (float& v : rec.direction) v = r.get<float>();
    for (float& v : rec.color) v = r.get<float>();
  }
  if (r.remaining() != 0) fail(ErrorKind::kDecode, "pseudo-image file: trailing bytes");
  return set;
}

void write_pseudo_images(const std::filesystem::path& path, const PseudoImageSet& set) {
  const auto bytes = encode_pseudo_images(set);
  write_file_bytes(path, bytes);
}

PseudoImageSet read_pseudo_images(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_pseudo_images(bytes);
}

}  // namespace rerend
