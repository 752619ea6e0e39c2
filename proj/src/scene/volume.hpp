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

#include "scene/radiance_field.hpp"

namespace rerend {

struct VolumeSample {
  Rgb color = Rgb::Zero();     // premultiplied radiance accumulated over the interval
  double transmittance = 1.0;  // remaining transmittance at t_far
};

/// Optional per-ray jitter of the quadrature nodes. Disabled by default.
struct QuadratureJitter {
  std::uint64_t seed = 0;
};

/// Stratified midpoint quadrature of the emission-absorption integral over
/// [t_near, t_far] with n_samples equal intervals:
///   alpha_i = 1 - exp(-sigma_i * delta),  T_i = prod_{j<i} (1 - alpha_j),
///   C = sum_i T_i * alpha_i * c_i.
/// Also returns the transmittance left after the last interval so partial
/// renders can be composited.
VolumeSample volume_integrate(const RadianceField& field, const Ray& ray, double t_near,
                              double t_far, int n_samples,
                              const std::optional<QuadratureJitter>& jitter = std::nullopt);

/// Color part of volume_integrate (no background).
Rgb volume_render(const RadianceField& field, const Ray& ray, double t_near, double t_far,
                  int n_samples);

}  // namespace rerend
