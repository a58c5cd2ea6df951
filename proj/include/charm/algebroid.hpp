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

#ifndef CHARM_ALGEBROID_HPP_
#define CHARM_ALGEBROID_HPP_

/**
 * @file
 * The Lie algebra on G = R^d + R^{d(d-1)/2} with basis eps_i, omega_ij
 *
 *   [eps_i, eps_j]     = omega_ij
 *   [eps_i, omega_jk]  = d_ij eps_k - d_ik eps_j
 *   [omega_ij, omega_kl] = d_il omega_jk + d_jk omega_il - d_ik omega_jl - d_jl omega_ik
 *
 * (omega_ji = -omega_ij), its anchor psi, brackets of sections and the
 * almost bracket obtained by dropping the omega block.
 *
 * Basis elements are addressed by their stacked index: eps_i is i, omega_ij
 * (i < j) is d + pair_index(i, j, d).
 */

#include <functional>
#include <utility>
#include <vector>

#include "charm/geometry.hpp"
#include "charm/horizontal_frame.hpp"

namespace charm {

/// Sparse integer combination of basis elements: (stacked index, coefficient).
using IntCombination = std::vector<std::pair<int, int>>;

class StructureConstants {
 public:
  explicit StructureConstants(int d);

  int dimension() const { return d_; }
  int size() const { return n_; }
  const IntCombination& bracket(int a, int b) const { return table_[a * n_ + b]; }

  /// Dense integer bracket of two integer coefficient vectors.
  std::vector<long long> bracket(const std::vector<long long>& a, const std::vector<long long>& b) const;

  bool is_antisymmetric() const;
  /// Every coefficient in {-1, 0, 1}.
  bool has_unit_coefficients() const;
  /// Recomputes the table from the displayed formulas and compares.
  bool matches_formulas() const;

 private:
  int d_;
  int n_;
  std::vector<IntCombination> table_;
};

/// Shared immutable table for dimension d.
const StructureConstants& structure_constants(int d);

/// Bilinear extension of the table. @throws StructuralError on mismatched d.
GVector g_bracket(const GVector& a, const GVector& b);

/// [a,[b,c]] + [b,[c,a]] + [c,[a,b]].
GVector jacobi_defect(const GVector& a, const GVector& b, const GVector& c);

struct JacobiReport {
  int dimension = 0;
  long long triples = 0;
  long long nonzero_triples = 0;
  long long max_abs_coefficient = 0;
};

/// Jacobi defect over every basis triple, in integer arithmetic.
JacobiReport exhaustive_jacobi(int d);

/// The anchor is psi.
TangentField anchor(const Configuration& u, const GVector& a);

/**
 * Sup distance at u between psi(u, [a, b]) and the analytic bracket of the
 * fields psi(., a), psi(., b), computed symbolically.
 */
double anchor_compatibility_defect(const Configuration& u, const GVector& a, const GVector& b);

inline constexpr double kDefaultFdStep = 1e-5;

/// A section u -> phi(u) of the trivial bundle with fiber G.
class SectionField {
 public:
  using Function = std::function<GVector(const Configuration&)>;

  explicit SectionField(Function f) : f_(std::move(f)) {}
  static SectionField constant(const GVector& a);

  GVector operator()(const Configuration& u) const { return f_(u); }

  /// Central difference (phi(R(u + h v)) - phi(R(u - h v))) / 2h with R the
  /// retraction onto the sphere.
  GVector derivative(const Configuration& u, const TangentField& v, double h = kDefaultFdStep) const;

 private:
  Function f_;
};

/// [phi(u), phi'(u)] + d phi(psi(u, phi'(u))) - d phi'(psi(u, phi(u))).
GVector section_bracket(const SectionField& phi, const SectionField& phi2, const Configuration& u,
                        double h = kDefaultFdStep);

/// section_bracket with the omega block set to zero.
GVector almost_bracket(const SectionField& phi, const SectionField& phi2, const Configuration& u,
                       double h = kDefaultFdStep);

/// The section u -> almost_bracket(phi, phi2, u).
SectionField almost_bracket_section(const SectionField& phi, const SectionField& phi2,
                                    double h = kDefaultFdStep);

/// Cyclic sum of nested almost brackets at u.
GVector almost_jacobi_defect(const SectionField& a, const SectionField& b, const SectionField& c,
                             const Configuration& u, double h = kDefaultFdStep);

}  // namespace charm

#endif  // CHARM_ALGEBROID_HPP_
