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
#include <optional>
#include <span>
#include <vector>

#include "field/field.hpp"
#include "geometry/bvh.hpp"
#include "scene/pseudo_images.hpp"

namespace rerend {

/// Per-ray loss is the squared L2 distance over RGB; the batch loss is its
/// mean over the counted rays. Rays without a hit are predicted as the
/// background (no gradient) unless drop_misses removes them from the mean.
struct LossOptions {
  Rgb background = Rgb::Ones();
  bool drop_misses = false;
  /// Treat beta as a constant: direction-network gradients are zero.
  bool detach_dir = false;
};

struct FieldGradient {
  double loss = 0.0;
  Vector pos;
  Vector dir;
  std::vector<double> per_ray;  // squared error of each ray (0 for dropped misses)
};

double loss(const FactorizedField& field, std::span<const PseudoRecord> batch,
            std::span<const std::optional<Hit>> hits, const LossOptions& options = {});

FieldGradient grad(const FactorizedField& field, std::span<const PseudoRecord> batch,
                   std::span<const std::optional<Hit>> hits, const LossOptions& options = {});

struct AdamState {
  Vector m;
  Vector v;
  std::int64_t step = 0;
};

/// One Adam update (beta1 0.9, beta2 0.999, eps 1e-8). The state is sized on
/// first use.
void adam_step(Vector& params, const Vector& gradient, AdamState& state, double lr);

/// Linear warm-up from 0 to base_lr over warmup_steps, then constant or,
/// with cosine, a half-cosine decay to 0 at total_steps.
double lr_schedule(std::int64_t step, std::int64_t warmup_steps, double base_lr,
                   std::int64_t total_steps = 0, bool cosine = false);

/// Draws ceil(hard_ratio * batch) indices uniformly from the top-loss decile
/// (the ceil(n/10) largest losses, ties to lower index) and the rest
/// uniformly from the whole pool.
std::vector<std::uint32_t> hard_ray_resample(std::size_t pool_size, std::span<const double> last_losses,
                                             double hard_ratio, std::size_t batch, std::uint64_t seed);

/// Indices of the top-loss decile, sorted ascending.
std::vector<std::uint32_t> top_loss_decile(std::span<const double> losses);

struct TrainConfig {
  std::size_t batch = 4096;
  std::int64_t steps = 20000;
  double base_lr = 5e-4;
  std::int64_t warmup = 500;
  bool cosine = false;
  double hard_ratio = 0.0;
  std::int64_t hard_refresh = 100;  // steps between top-decile refreshes
  std::int64_t log_every = 100;
  std::uint64_t seed = 0;
  LossOptions loss;
};

struct HistoryEntry {
  std::int64_t step = 0;
  double loss = 0.0;
};

struct TrainResult {
  FactorizedField field;
  std::vector<HistoryEntry> history;
};

/// First hits of every record's ray, computed in parallel.
std::vector<std::optional<Hit>> precompute_hits(const Bvh& bvh, std::span<const PseudoRecord> records);

TrainResult train(const FactorizedField& field, const PseudoImageSet& pseudo, const Bvh& bvh,
                  const TrainConfig& config);

}  // namespace rerend
