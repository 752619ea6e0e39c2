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

#include "field/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "common/rng.hpp"

namespace rerend {

namespace {

// Gradients are reduced over fixed-size chunks in chunk order, so results
// do not depend on the number of worker threads.
constexpr std::size_t kChunk = 256;

struct ChunkResult {
  double loss_sum = 0.0;
  std::size_t counted = 0;
  Vector pos;
  Vector dir;
};

FieldGradient evaluate(const FactorizedField& field, std::span<const PseudoRecord> batch,
                       std::span<const std::optional<Hit>> hits, const LossOptions& options,
                       bool with_grad) {
  require(!batch.empty(), "loss needs a nonempty batch");
  require(batch.size() == hits.size(), "loss needs one hit entry per ray");
  const int dim = field.dim;
  const std::size_t n_chunks = (batch.size() + kChunk - 1) / kChunk;
  std::vector<ChunkResult> chunks(n_chunks);
  FieldGradient out;
  out.per_ray.assign(batch.size(), 0.0);

  parallel_chunks(batch.size(), kChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    ChunkResult& res = chunks[c];
    std::vector<std::size_t> hit_rows;
    for (std::size_t i = begin; i < end; ++i) {
      if (hits[i]) {
        hit_rows.push_back(i);
        continue;
      }
      if (options.drop_misses) continue;
      const double e = (options.background - batch[i].rgb()).squaredNorm();
      out.per_ray[i] = e;
      res.loss_sum += e;
      ++res.counted;
    }
    if (with_grad) {
      res.pos = Vector::Zero(field.pos.params().size());
      res.dir = Vector::Zero(field.dir.params().size());
    }
    if (hit_rows.empty()) return;

    const auto m = static_cast<Eigen::Index>(hit_rows.size());
    Matrix points(3, m);
    Matrix dirs(3, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const std::size_t i = hit_rows[static_cast<std::size_t>(k)];
      points.col(k) = hits[i]->point;
      dirs.col(k) = batch[i].ray().direction;
    }
    Mlp::Tape pos_tape;
    Mlp::Tape dir_tape;
    const Matrix uvw = field.pos.forward(points, with_grad ? &pos_tape : nullptr);
    const Matrix beta = field.dir.forward(dirs, with_grad ? &dir_tape : nullptr);

    Matrix g_uvw(3 * dim, m);
    Matrix g_beta(dim, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const std::size_t i = hit_rows[static_cast<std::size_t>(k)];
      const Rgb target = batch[i].rgb();
      double e = 0.0;
      g_beta.col(k).setZero();
      for (int ch = 0; ch < 3; ++ch) {
        const auto emb = uvw.col(k).segment(ch * dim, dim);
        const double s = sigmoid(emb.dot(beta.col(k)));
        const double diff = s - target[ch];
        e += diff * diff;
        // d(diff^2)/dlogit; the 1/N of the mean is applied after reduction.
        const double dz = 2.0 * diff * s * (1.0 - s);
        g_uvw.col(k).segment(ch * dim, dim) = dz * beta.col(k);
        g_beta.col(k) += dz * emb;
      }
      out.per_ray[i] = e;
      res.loss_sum += e;
      ++res.counted;
    }
    if (!with_grad) return;
    field.pos.backward(pos_tape, g_uvw, res.pos);
    if (!options.detach_dir) field.dir.backward(dir_tape, g_beta, res.dir);
  });

  std::size_t counted = 0;
  double total = 0.0;
  for (const ChunkResult& c : chunks) {
    total += c.loss_sum;
    counted += c.counted;
  }
  require(counted > 0, "loss needs at least one counted ray (every ray was a dropped miss)");
  const double inv = 1.0 / static_cast<double>(counted);
  out.loss = total * inv;
  if (with_grad) {
    out.pos = Vector::Zero(field.pos.params().size());
    out.dir = Vector::Zero(field.dir.params().size());
    for (const ChunkResult& c : chunks) {
      out.pos += c.pos;
      out.dir += c.dir;
    }
    out.pos *= inv;
    out.dir *= inv;
  }
  return out;
}

}  // namespace

double loss(const FactorizedField& field, std::span<const PseudoRecord> batch,
            std::span<const std::optional<Hit>> hits, const LossOptions& options) {
  return evaluate(field, batch, hits, options, false).loss;
}

FieldGradient grad(const FactorizedField& field, std::span<const PseudoRecord> batch,
                   std::span<const std::optional<Hit>> hits, const LossOptions& options) {
  return evaluate(field, batch, hits, options, true);
}

void adam_step(Vector& params, const Vector& gradient, AdamState& state, double lr) {
  require(params.size() == gradient.size(), "adam_step: gradient shape does not match parameters");
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  if (state.m.size() != params.size()) {
    state.m = Vector::Zero(params.size());
    state.v = Vector::Zero(params.size());
    state.step = 0;
  }
  ++state.step;
  state.m = kBeta1 * state.m + (1.0 - kBeta1) * gradient;
  state.v = kBeta2 * state.v + (1.0 - kBeta2) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + kEps);
}

double lr_schedule(std::int64_t step, std::int64_t warmup_steps, double base_lr,
                   std::int64_t total_steps, bool cosine) {
  require(step >= 0, "lr_schedule needs step >= 0");
  if (step < warmup_steps) return base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
  if (!cosine || total_steps <= warmup_steps) return base_lr;
  const double x = std::min(1.0, static_cast<double>(step - warmup_steps) /
                                     static_cast<double>(total_steps - warmup_steps));
  return base_lr * 0.5 * (1.0 + std::cos(kPi * x));
}

std::vector<std::uint32_t> top_loss_decile(std::span<const double> losses) {
  const std::size_t n = losses.size();
  if (n == 0) return {};
  const std::size_t k = (n + 9) / 10;
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  auto harder = [&](std::uint32_t a, std::uint32_t b) {
    return losses[a] > losses[b] || (losses[a] == losses[b] && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(), harder);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

std::vector<std::uint32_t> draw(std::size_t pool_size, std::span<const std::uint32_t> hard,
                                double hard_ratio, std::size_t batch, Rng& rng) {
  const auto n_hard = hard.empty() ? std::size_t{0}
                                   : static_cast<std::size_t>(std::ceil(hard_ratio * static_cast<double>(batch)));
  std::vector<std::uint32_t> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < std::min(n_hard, batch); ++i) out.push_back(hard[rng.below(hard.size())]);
  while (out.size() < batch) out.push_back(static_cast<std::uint32_t>(rng.below(pool_size)));
  return out;
}

}  // namespace

std::vector<std::uint32_t> hard_ray_resample(std::size_t pool_size, std::span<const double> last_losses,
                                             double hard_ratio, std::size_t batch, std::uint64_t seed) {
  require(hard_ratio >= 0.0 && hard_ratio <= 1.0, "hard_ratio must be in [0, 1]");
  require(pool_size >= 1, "hard_ray_resample needs a nonempty pool");
  require(last_losses.size() == pool_size, "hard_ray_resample needs one loss per pool ray");
  Rng rng(seed);
  const auto hard = hard_ratio > 0.0 ? top_loss_decile(last_losses) : std::vector<std::uint32_t>{};
  return draw(pool_size, hard, hard_ratio, batch, rng);
}

std::vector<std::optional<Hit>> precompute_hits(const Bvh& bvh, std::span<const PseudoRecord> records) {
  std::vector<std::optional<Hit>> hits(records.size());
  parallel_chunks(records.size(), 1024, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) hits[i] = bvh.first_hit(records[i].ray());
  });
  return hits;
}

TrainResult train(const FactorizedField& field, const PseudoImageSet& pseudo, const Bvh& bvh,
                  const TrainConfig& config) {
  require(!pseudo.records.empty(), "training needs a nonempty pseudo-image set");
  require(config.batch >= 1, "batch size must be >= 1");
  require(config.steps >= 0, "step count must be >= 0");
  require(config.warmup >= 0 && config.warmup <= std::max<std::int64_t>(config.steps, 0),
          "warm-up must not exceed the step count");
  require(config.hard_ratio >= 0.0 && config.hard_ratio <= 1.0, "hard_ratio must be in [0, 1]");
  require(config.log_every >= 1 && config.hard_refresh >= 1, "logging and refresh intervals must be >= 1");

  TrainResult result{field, {}};
  if (config.steps == 0) return result;

  const auto hits = precompute_hits(bvh, pseudo.records);
  const std::size_t pool = pseudo.records.size();
  std::vector<double> last_losses(pool, 0.0);
  std::vector<std::uint32_t> hard;
  Rng rng(derive_seed(config.seed, "train/batches"));
  AdamState pos_state;
  AdamState dir_state;
  std::vector<PseudoRecord> batch(config.batch);
  std::vector<std::optional<Hit>> batch_hits(config.batch);

  for (std::int64_t step = 0; step < config.steps; ++step) {
    if (config.hard_ratio > 0.0 && step % config.hard_refresh == 0) hard = top_loss_decile(last_losses);
    const auto idx = draw(pool, hard, config.hard_ratio, config.batch, rng);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      batch[k] = pseudo.records[idx[k]];
      batch_hits[k] = hits[idx[k]];
    }
    const FieldGradient g = grad(result.field, batch, batch_hits, config.loss);
    if (!std::isfinite(g.loss) || !g.pos.allFinite() || !g.dir.allFinite()) {
      fail(ErrorKind::kNumeric, "training diverged at step " + std::to_string(step) + " (loss is not finite)");
    }
    for (std::size_t k = 0; k < idx.size(); ++k) last_losses[idx[k]] = g.per_ray[k];
    if (step % config.log_every == 0 || step + 1 == config.steps) result.history.push_back({step, g.loss});

    const double lr = lr_schedule(step + 1, config.warmup, config.base_lr, config.steps, config.cosine);
    adam_step(result.field.pos.params(), g.pos, pos_state, lr);
    if (!config.loss.detach_dir) adam_step(result.field.dir.params(), g.dir, dir_state, lr);
  }
  return result;
}

}  // namespace rerend
