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

#ifndef CHARM_HORIZONTAL_FRAME_HPP_
#define CHARM_HORIZONTAL_FRAME_HPP_

/**
 * @file
 * Horizontal frame fields E_i(u)(s) = e_i - u_i(s) u(s), their brackets
 * [E_i, E_j](u) = u_j E_i(u) - u_i E_j(u), and the map
 *
 *   Psi_u(sigma, xi) = sum_i sigma_i E_i(u) + sum_{i<j} xi_ij [E_i, E_j](u)
 *
 * whose image is the integrable hull of the horizontal distribution.
 *
 * Bracket convention: [X, Y] = DX.Y - DY.X. Indices are zero-based.
 */

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "charm/endpoint_map.hpp"
#include "charm/geometry.hpp"

namespace charm {

/// Number of pairs i < j for dimension d.
constexpr int num_pairs(int d) { return d * (d - 1) / 2; }

/// Lexicographic position of the pair (i, j), i < j.
int pair_index(int i, int j, int d);

/// Inverse of pair_index.
std::pair<int, int> pair_at(int index, int d);

/// Coefficients (sigma, xi) in R^d + R^{d(d-1)/2}, xi in lexicographic order.
struct GVector {
  Vector sigma;
  Vector xi;

  static GVector zero(int d);
  static GVector epsilon(int d, int i);
  static GVector omega(int d, int i, int j);
  static GVector from_stacked(int d, const Vector& stacked);

  int dimension() const { return static_cast<int>(sigma.size()); }
  int size() const { return static_cast<int>(sigma.size() + xi.size()); }
  Vector stacked() const;
  double norm() const { return std::sqrt(sigma.squaredNorm() + xi.squaredNorm()); }

  GVector operator+(const GVector& other) const;
  GVector operator-(const GVector& other) const;
  GVector operator*(double scale) const;
};

TangentField frame_field(const Configuration& u, int i);

/// Pointwise g - <g, u(s)> u(s); equals frame_field(u, i) for g = e_i.
TangentField horizontal_gradient(const Configuration& u, const Vector& g);

/// @throws StructuralError for i == j unless `allow_equal` (then zero).
TangentField bracket_field(const Configuration& u, int i, int j, bool allow_equal = false);

TangentField psi(const Configuration& u, const GVector& a);

/// Psi computed with the frame of the orthonormal basis given by the columns
/// of `basis` instead of the coordinate basis.
TangentField psi(const Configuration& u, const GVector& a, const Matrix& basis);

/**
 * Columns Psi_u(basis element) for sigma blocks first then xi blocks, each a
 * stacked (d * S)-vector weighted by sqrt(quadrature weight) so that the
 * Euclidean inner product of columns is the L2 inner product of fields.
 */
Matrix psi_columns(const Configuration& u, const Matrix* basis = nullptr);

/// Flattened, weighted layout used by psi_columns.
Vector stack_weighted(const TangentField& v);
Matrix unstack_weighted(const Configuration& u, const Vector& stacked);

/// Orthonormal basis (columns) of span{u(s_k) - u(s_0)}.
Matrix v_subspace(const Configuration& u, double tol_rank = 1e-9);

enum class TangentModel { kArm, kSampled };

struct RankReport {
  TangentModel model = TangentModel::kArm;
  int v_dim = 0;
  int rank = 0;
  std::vector<GVector> kernel_basis;
  Vector singular_values;  ///< descending, padded with zeros to d + d(d-1)/2
  int predicted_rank = 0;
  bool singular = false;
};

/**
 * Numerical rank of Psi_u in the chosen tangent model together with the
 * kernel-count prediction
 *
 *   rank = d + d(d-1)/2 - (d-m)(d-m-1)/2 - [m <= 1],   m = dim V_u.
 *
 * The first correction counts antisymmetric maps vanishing on V_u; the
 * second is the dilation fixing a point pair, present whenever the values of
 * u lie on a 0-sphere (constant, antipodal or two-valued configurations;
 * every singular configuration is of this type).
 */
RankReport dbar_rank(const Configuration& u, TangentModel model, double tol_rank = 1e-9,
                     std::optional<double> tol_singular = std::nullopt);

int predicted_dbar_rank(int d, int v_dim);

/**
 * L2-orthogonal projection onto D_u = span{E_i(u)}: returns the horizontal
 * gradient of w where A_u w = pushforward(u, v).
 *
 * @throws NoSolutionError at a singular u when the pushforward has a
 * component along the axis.
 */
TangentField horizontal_projection(const Configuration& u, const TangentField& v,
                                   std::optional<double> tol_singular = std::nullopt);

/// Orthonormal basis of the numerical column space of `a`.
Matrix column_space(const Matrix& a, double tol_rank);

/// Sine of the largest principal angle between two subspaces given by
/// orthonormal columns; 1 when dimensions differ.
double max_principal_angle_sin(const Matrix& q1, const Matrix& q2);

}  // namespace charm

#endif  // CHARM_HORIZONTAL_FRAME_HPP_
