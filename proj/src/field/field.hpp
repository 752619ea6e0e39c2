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
#include <filesystem>
#include <span>
#include <vector>

#include "common/math.hpp"
#include "field/mlp.hpp"

namespace rerend {

/// Per-point embeddings u, v, w (one D-vector per color channel).
struct EmbeddingTriplet {
  Vector u;
  Vector v;
  Vector w;
};

struct FieldArch {
  int dim = 32;  // D
  int pos_depth = 8;
  int pos_width = 128;
  int pos_frequencies = 6;
  int dir_depth = 4;
  int dir_width = 64;
  int dir_frequencies = 4;
  /// Residual pairs are used for networks at least this deep.
  int residual_min_depth = 8;
};

/// Position network p -> [u, v, w] (3D outputs, stored u then v then w) and
/// direction network d -> beta (D outputs); color = Sig([u v w]^T beta).
struct FactorizedField {
  int dim = 0;
  Mlp pos;
  Mlp dir;
};

FactorizedField init_field(const FieldArch& arch, std::uint64_t seed);

/// Convenience overload using one width for both networks.
FactorizedField init_field(int dim, int pos_depth, int dir_depth, int width, std::uint64_t seed);

EmbeddingTriplet pos_embed(const FactorizedField& field, const Vec3& p);
Vector dir_embed(const FactorizedField& field, const Vec3& d);

/// Batched variants; points and directions are 3 x N.
Matrix pos_embed_batch(const FactorizedField& field, const Matrix& points);
Matrix dir_embed_batch(const FactorizedField& field, const Matrix& directions);

/// Pre-sigmoid color ([u v w]^T beta).
Rgb color_logits(const EmbeddingTriplet& t, const Vector& beta);
Rgb predict_color(const EmbeddingTriplet& t, const Vector& beta);

/// Continuous evaluation of the field at a surface point seen along d.
Rgb field_color(const FactorizedField& field, const Vec3& p, const Vec3& d);

inline constexpr std::uint32_t kCheckpointVersion = 1;
std::vector<std::uint8_t> encode_checkpoint(const FactorizedField& field);
FactorizedField decode_checkpoint(std::span<const std::uint8_t> bytes);
void write_checkpoint(const std::filesystem::path& path, const FactorizedField& field);
FactorizedField read_checkpoint(const std::filesystem::path& path);

}  // namespace rerend
