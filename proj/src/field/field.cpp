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

#include "field/field.hpp"

#include <cmath>
#include <cstring>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"

namespace rerend {

FactorizedField init_field(const FieldArch& arch, std::uint64_t seed) {
  require(arch.dim >= 1, "embedding dimension D must be >= 1");
  FactorizedField f;
  f.dim = arch.dim;
  MlpShape pos{3, arch.pos_frequencies, arch.pos_width, arch.pos_depth, 3 * arch.dim,
               arch.pos_depth >= arch.residual_min_depth};
  MlpShape dir{3, arch.dir_frequencies, arch.dir_width, arch.dir_depth, arch.dim,
               arch.dir_depth >= arch.residual_min_depth};
  f.pos = Mlp(pos);
  f.dir = Mlp(dir);
  f.pos.init_he_uniform(derive_seed(seed, "field/pos"));
  f.dir.init_he_uniform(derive_seed(seed, "field/dir"));
  return f;
}

FactorizedField init_field(int dim, int pos_depth, int dir_depth, int width, std::uint64_t seed) {
  FieldArch arch;
  arch.dim = dim;
  arch.pos_depth = pos_depth;
  arch.dir_depth = dir_depth;
  arch.pos_width = width;
  arch.dir_width = width;
  return init_field(arch, seed);
}

Matrix pos_embed_batch(const FactorizedField& field, const Matrix& points) {
  require(points.allFinite(), "pos_embed needs finite positions");
  return field.pos.forward(points);
}

namespace {

void check_unit(const Vec3& d) {
  if (!(std::abs(d.norm() - 1.0) <= 1e-6)) {
    fail(ErrorKind::kInvalidArgument, "dir_embed needs a unit direction (|d| = " + std::to_string(d.norm()) + ")");
  }
}

}  // namespace

Matrix dir_embed_batch(const FactorizedField& field, const Matrix& directions) {
  for (Eigen::Index i = 0; i < directions.cols(); ++i) check_unit(directions.col(i));
  return field.dir.forward(directions);
}

EmbeddingTriplet pos_embed(const FactorizedField& field, const Vec3& p) {
  const Matrix out = pos_embed_batch(field, p);
  const int d = field.dim;
  return EmbeddingTriplet{out.col(0).head(d), out.col(0).segment(d, d), out.col(0).tail(d)};
}

Vector dir_embed(const FactorizedField& field, const Vec3& d) { return dir_embed_batch(field, d).col(0); }

Rgb color_logits(const EmbeddingTriplet& t, const Vector& beta) {
  if (t.u.size() != beta.size() || t.v.size() != beta.size() || t.w.size() != beta.size()) {
    fail(ErrorKind::kDimension, "embedding dimension mismatch between position and direction outputs");
  }
  return Rgb(t.u.dot(beta), t.v.dot(beta), t.w.dot(beta));
}

Rgb predict_color(const EmbeddingTriplet& t, const Vector& beta) {
  const Rgb z = color_logits(t, beta);
  return Rgb(sigmoid(z.x()), sigmoid(z.y()), sigmoid(z.z()));
}

Rgb field_color(const FactorizedField& field, const Vec3& p, const Vec3& d) {
  return predict_color(pos_embed(field, p), dir_embed(field, d));
}

namespace {

void put_shape(ByteWriter& w, const Mlp& mlp) {
  const MlpShape& s = mlp.shape();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.in_dim));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.frequencies));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.width));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.depth));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.out_dim));
  w.put<std::uint32_t>(s.residual ? 1u : 0u);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.layer_count()));
  for (int l = 0; l < s.layer_count(); ++l) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.layer_out(l)));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.layer_in(l)));
  }
}

MlpShape get_shape(ByteReader& r) {
  MlpShape s;
  auto get_int = [&r](std::uint32_t max) {
    const auto v = r.get<std::uint32_t>();
    if (v > max) fail(ErrorKind::kDecode, "checkpoint: implausible layer shape value " + std::to_string(v));
    return static_cast<int>(v);
  };
  s.in_dim = get_int(64);
  s.frequencies = get_int(30);
  s.width = get_int(1u << 16);
  s.depth = get_int(1024);
  s.out_dim = get_int(1u << 16);
  s.residual = r.get<std::uint32_t>() != 0;
  const int layers = get_int(1025);
  if (layers != s.layer_count()) fail(ErrorKind::kDecode, "checkpoint: layer count does not match depth");
  for (int l = 0; l < layers; ++l) {
    const int rows = get_int(1u << 16);
    const int cols = get_int(1u << 16);
    if (rows != s.layer_out(l) || cols != s.layer_in(l)) {
      fail(ErrorKind::kDecode, "checkpoint: layer " + std::to_string(l) + " shape is inconsistent");
    }
  }
  return s;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const FactorizedField& field) {
  ByteWriter w;
  w.put_bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("RRFF"), 4));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(field.dim));
  put_shape(w, field.pos);
  put_shape(w, field.dir);
  for (const Mlp* m : {&field.pos, &field.dir}) {
    w.put<std::uint64_t>(static_cast<std::uint64_t>(m->params().size()));
    for (Eigen::Index i = 0; i < m->params().size(); ++i) w.put<double>(m->params()[i]);
  }
  return w.bytes();
}

FactorizedField decode_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "checkpoint");
  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.get<std::uint8_t>());
  if (std::memcmp(magic, "RRFF", 4) != 0) fail(ErrorKind::kDecode, "checkpoint: bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    fail(ErrorKind::kVersion, "checkpoint: unsupported version " + std::to_string(version));
  }
  FactorizedField f;
  f.dim = static_cast<int>(r.get<std::uint32_t>());
  const MlpShape pos = get_shape(r);
  const MlpShape dir = get_shape(r);
  if (f.dim < 1 || pos.out_dim != 3 * f.dim || dir.out_dim != f.dim || pos.in_dim != 3 || dir.in_dim != 3) {
    fail(ErrorKind::kDimension, "checkpoint: network outputs do not match D = " + std::to_string(f.dim));
  }
  f.pos = Mlp(pos);
  f.dir = Mlp(dir);
  for (Mlp* m : {&f.pos, &f.dir}) {
    const auto n = r.get<std::uint64_t>();
    if (n != static_cast<std::uint64_t>(m->params().size())) {
      fail(ErrorKind::kDecode, "checkpoint: parameter count does not match the layer shapes");
    }
    for (Eigen::Index i = 0; i < m->params().size(); ++i) m->params()[i] = r.get<double>();
    if (!m->params().allFinite()) fail(ErrorKind::kNumeric, "checkpoint: non-finite parameters");
  }
  if (r.remaining() != 0) fail(ErrorKind::kDecode, "checkpoint: trailing bytes");
  return f;
}

void write_checkpoint(const std::filesystem::path& path, const FactorizedField& field) {
  write_file_bytes(path, encode_checkpoint(field));
}

FactorizedField read_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file_bytes(path));
}

}  // namespace rerend
