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

#include "field/mlp.hpp"

#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace rerend {

std::size_t MlpShape::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < layer_count(); ++l) {
    n += static_cast<std::size_t>(layer_out(l)) * (static_cast<std::size_t>(layer_in(l)) + 1);
  }
  return n;
}

Mlp::Mlp(const MlpShape& shape) : shape_(shape) {
  require(shape.in_dim >= 1 && shape.out_dim >= 1, "MLP dimensions must be positive");
  require(shape.width >= 1 && shape.depth >= 1, "MLP width and depth must be positive");
  require(shape.frequencies >= 0 && shape.frequencies <= 30, "MLP frequency count out of range");
  std::size_t offset = 0;
  for (int l = 0; l < shape.layer_count(); ++l) {
    offsets_.push_back(offset);
    offset += static_cast<std::size_t>(shape.layer_out(l)) * (static_cast<std::size_t>(shape.layer_in(l)) + 1);
  }
  params_ = Vector::Zero(static_cast<Eigen::Index>(offset));
}

Eigen::Map<const Matrix> Mlp::weight(int layer) const {
  return Eigen::Map<const Matrix>(params_.data() + offsets_[layer], shape_.layer_out(layer),
                                  shape_.layer_in(layer));
}

std::size_t Mlp::bias_offset(int layer) const {
  return offsets_[layer] +
         static_cast<std::size_t>(shape_.layer_out(layer)) * static_cast<std::size_t>(shape_.layer_in(layer));
}

Eigen::Map<const Vector> Mlp::bias(int layer) const {
  return Eigen::Map<const Vector>(params_.data() + bias_offset(layer), shape_.layer_out(layer));
}

void Mlp::init_he_uniform(std::uint64_t seed) {
  Rng rng(seed);
  params_.setZero();
  for (int l = 0; l < shape_.layer_count(); ++l) {
    const double limit = std::sqrt(6.0 / shape_.layer_in(l));
    const std::size_t n =
        static_cast<std::size_t>(shape_.layer_out(l)) * static_cast<std::size_t>(shape_.layer_in(l));
    for (std::size_t i = 0; i < n; ++i) params_[static_cast<Eigen::Index>(offsets_[l] + i)] = rng.uniform(-limit, limit);
  }
}

Matrix Mlp::encode(const Matrix& x) const {
  const int d = shape_.in_dim;
  Matrix e(shape_.encoded_dim(), x.cols());
  e.topRows(d) = x;
  double scale = 1.0;
  for (int k = 0; k < shape_.frequencies; ++k) {
    const Matrix s = scale * x;
    e.middleRows(d * (1 + 2 * k), d) = s.array().sin().matrix();
    e.middleRows(d * (2 + 2 * k), d) = s.array().cos().matrix();
    scale *= 2.0;
  }
  return e;
}

Matrix Mlp::forward(const Matrix& x, Tape* tape) const {
  require(x.rows() == shape_.in_dim, "MLP input dimension mismatch");
  Matrix h = encode(x);
  if (tape) {
    tape->inputs.assign(shape_.layer_count(), Matrix());
    tape->pre.assign(shape_.layer_count(), Matrix());
  }
  Matrix block_input;
  for (int l = 0; l < shape_.layer_count(); ++l) {
    Matrix z = weight(l) * h;
    z.colwise() += bias(l);
    if (!z.allFinite()) fail(ErrorKind::kNumeric, "non-finite activation in MLP layer " + std::to_string(l));
    if (tape) {
      tape->inputs[l] = h;
      tape->pre[l] = z;
    }
    if (l == shape_.depth) return z;
    if (shape_.residual && l >= 1 && l % 2 == 1 && l + 1 < shape_.depth) block_input = h;
    h = z.cwiseMax(0.0);
    if (shape_.closes_block(l)) h += block_input;
  }
  return h;  // unreachable: the output layer returns above
}

void Mlp::backward(const Tape& tape, const Matrix& grad_out, Vector& grad) const {
  require(grad.size() == params_.size(), "gradient buffer size mismatch");
  Matrix g = grad_out;  // dL/d(output of layer l)
  Matrix skip;          // gradient routed around the current residual pair
  for (int l = shape_.depth; l >= 0; --l) {
    Matrix dz;
    if (l == shape_.depth) {
      dz = g;
    } else {
      if (shape_.closes_block(l)) skip = g;
      dz = g.cwiseProduct((tape.pre[l].array() > 0.0).cast<double>().matrix());
    }
    Eigen::Map<Matrix> dw(grad.data() + offsets_[l], shape_.layer_out(l), shape_.layer_in(l));
    Eigen::Map<Vector> db(grad.data() + bias_offset(l), shape_.layer_out(l));
    dw.noalias() += dz * tape.inputs[l].transpose();
    db.noalias() += dz.rowwise().sum();
    if (l == 0) break;
    g.noalias() = weight(l).transpose() * dz;
    // The first layer of a pair receives its input from the pair's input,
    // which also feeds the skip connection.
    if (shape_.residual && l >= 1 && l % 2 == 1 && l + 1 < shape_.depth) g += skip;
  }
}

}  // namespace rerend
