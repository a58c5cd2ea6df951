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

#ifndef CHARM_SUITES_HPP_
#define CHARM_SUITES_HPP_

// Identity suites behind the `brackets` and `algebroid` subcommands.

#include <cstdint>
#include <vector>

#include "charm/scenario_io.hpp"

namespace charm {

struct LadderErrors {
  double first = 0.0;   ///< symbolic [E_i, E_j] vs u_j E_i - u_i E_j
  double second = 0.0;  ///< [E_i, [E_j, E_k]] vs d_ij E_k - d_ik E_j
  double third = 0.0;   ///< [[E_i, E_j], [E_k, E_l]] vs the four-term formula
};

/// Symbolic nested brackets of the frame fields evaluated at u.
LadderErrors ladder_errors(const Configuration& u);

struct LoopRow {
  double t = 0.0;
  double max_error = 0.0;  ///< sup over configurations and pairs i != j
};

/// Commutator-loop estimate errors against bracket_field for each t.
std::vector<LoopRow> loop_convergence(const std::vector<Configuration>& configs, const std::vector<double>& ts);

/// Ladder identities and the loop convergence table on `trials` random arms.
Json bracket_suite(int d, int trials, std::uint64_t seed);

/// Exhaustive Jacobi for d = 2..d_max, anchor compatibility on random
/// inputs, and the almost-bracket Jacobi defect on (eps_1, eps_2, eps_3).
Json algebroid_suite(int d_max, int trials, std::uint64_t seed);

}  // namespace charm

#endif  // CHARM_SUITES_HPP_
