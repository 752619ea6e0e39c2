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

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace rerend {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Architecture of a fully connected network with positional encoding.
///
/// The input x (in_dim values) is encoded as
///   [x, sin(2^0 x), cos(2^0 x), ..., sin(2^(F-1) x), cos(2^(F-1) x)]
/// and fed through `depth` hidden ReLU layers of `width` units and a final
/// linear layer with out_dim outputs. With `residual`, hidden layers 1..depth-1
/// are grouped in pairs and each pair's input is added to its output.
struct MlpShape {
  int in_dim = 3;
  int frequencies = 0;
  int width = 64;
  int depth = 2;
  int out_dim = 1;
  bool residual = false;

  int encoded_dim() const { return in_dim * (1 + 2 * frequencies); }
  int layer_count() const { return depth + 1; }
  int layer_in(int layer) const { return layer == 0 ? encoded_dim() : width; }
  int layer_out(int layer) const { return layer == depth ? out_dim : width; }
  /// True for the second layer of a residual pair.
  bool closes_block(int layer) const {
    return residual && layer >= 2 && layer < depth && layer % 2 == 0;
  }
  std::size_t parameter_count() const;

  bool operator==(const MlpShape&) const = default;
};

/// Flat parameter storage; layer l holds a layer_out × layer_in weight
/// matrix (column-major) followed by its bias.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(const MlpShape& shape);

  const MlpShape& shape() const { return shape_; }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  Eigen::Map<const Matrix> weight(int layer) const;
  Eigen::Map<const Vector> bias(int layer) const;
  std::size_t weight_offset(int layer) const { return offsets_[layer]; }
  std::size_t bias_offset(int layer) const;

  /// He-uniform weights, zero biases.
  void init_he_uniform(std::uint64_t seed);

  /// Positional encoding of a batch, one sample per column.
  Matrix encode(const Matrix& x) const;

  struct Tape {
    std::vector<Matrix> inputs;  // input of each layer; inputs[0] is the encoding
    std::vector<Matrix> pre;     // pre-activation of each layer
  };

  /// Forward pass on a batch (columns). Raises kNumeric on non-finite
  /// intermediates. When `tape` is given the activations are recorded for
  /// backward().
  Matrix forward(const Matrix& x, Tape* tape = nullptr) const;

  /// Accumulates dL/dparams into `grad` (same layout as params()) given
  /// dL/doutput for the recorded batch.
  void backward(const Tape& tape, const Matrix& grad_out, Vector& grad) const;

 private:
  MlpShape shape_;
  Vector params_;
  std::vector<std::size_t> offsets_;
};

}  // namespace rerend
