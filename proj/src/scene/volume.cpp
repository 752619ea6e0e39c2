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

#include "scene/volume.hpp"

#include <cmath>
#include <sstream>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace rerend {

namespace {

[[noreturn]] void non_finite(const char* what, const Vec3& p) {
  std::ostringstream ss;
  ss << "non-finite " << what << " at sample position (" << p.x() << ", " << p.y() << ", "
     << p.z() << ")";
  fail(ErrorKind::kNumeric, ss.str());
}

}  // namespace

VolumeSample volume_integrate(const RadianceField& field, const Ray& ray, double t_near,
                              double t_far, int n_samples,
                              const std::optional<QuadratureJitter>& jitter) {
  require(t_near < t_far, "volume_render needs t_near < t_far");
  require(n_samples >= 2, "volume_render needs at least 2 samples");

  std::optional<Rng> rng;
  if (jitter) rng.emplace(jitter->seed);

  const double delta = (t_far - t_near) / n_samples;
  VolumeSample out;
  for (int i = 0; i < n_samples; ++i) {
    const double offset = rng ? rng->uniform() : 0.5;
    const double t = t_near + (i + offset) * delta;
    const Vec3 p = ray.at(t);
    const double sigma = field.density(p);
    if (!std::isfinite(sigma)) non_finite("density", p);
    if (sigma <= 0.0) continue;
    const Rgb c = field.color(p, ray.direction);
    if (!all_finite(c)) non_finite("color", p);
    const double alpha = -std::expm1(-sigma * delta);
    out.color += out.transmittance * alpha * c;
    out.transmittance *= 1.0 - alpha;
  }
  out.color = out.color.cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

Rgb volume_render(const RadianceField& field, const Ray& ray, double t_near, double t_far,
                  int n_samples) {
  return volume_integrate(field, ray, t_near, t_far, n_samples).color;
}

}  // namespace rerend
