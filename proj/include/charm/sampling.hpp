// Copyright 2026 The Charm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CHARM_SAMPLING_HPP_
#define CHARM_SAMPLING_HPP_

// Seeded random inputs shared by the CLI suites.

#include <random>

#include "charm/control.hpp"
#include "charm/geometry.hpp"
#include "charm/horizontal_frame.hpp"

namespace charm {

using Rng = std::mt19937_64;

Vector random_unit(int d, Rng& rng);
Vector random_gaussian(int d, Rng& rng);

/// Random segment lengths in [0.5, 1.5] and uniformly random directions.
Configuration random_arm(int d, int segments, Rng& rng);

/// Smooth random curve per segment on a trapezoid or Gauss rule.
Configuration random_sampled(int d, int segments, int nodes_per_segment, Rng& rng,
                             QuadratureScheme scheme = QuadratureScheme::kTrapezoid);

GVector random_gvector(int d, Rng& rng);

/// Random orthogonal matrix (QR of a Gaussian matrix with sign fix).
Matrix random_orthogonal(int d, Rng& rng);

/// `steps` random frame-field flows with durations in [0.1, 1].
FlowSchedule random_schedule(int d, int steps, Rng& rng);

}  // namespace charm

#endif  // CHARM_SAMPLING_HPP_
