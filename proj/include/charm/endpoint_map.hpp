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

#ifndef CHARM_ENDPOINT_MAP_HPP_
#define CHARM_ENDPOINT_MAP_HPP_

/**
 * @file
 * The endpoint (head) map E(u) = S_u(L), the snake shape S_u, the tangent
 * map of E, and the Gram operator Gamma_u with A_u = L Id - Gamma_u.
 *
 * u is a singular point of E exactly when L is an eigenvalue of Gamma_u,
 * i.e. when the values of u span a line; the margin L - lambda_max(Gamma_u)
 * is the spectral decision variable and the pointwise distance of u(s) to
 * {+axis, -axis} is the geometric certificate.
 */

#include <optional>

#include "charm/geometry.hpp"

namespace charm {

struct GramData {
  Matrix gamma;         ///< entries int u_i u_j ds
  Matrix a_op;          ///< L Id - gamma
  Vector eigenvalues;   ///< of gamma, descending
  Matrix eigenvectors;  ///< columns match `eigenvalues`, first nonzero coordinate positive
  double length = 0.0;
  double margin = 0.0;  ///< L - eigenvalues(0)
};

struct SingularityReport {
  bool is_singular = false;
  double margin = 0.0;
  std::optional<Vector> axis;  ///< leading eigenvector, present when singular
  /// max_k min(||u_k - axis||, ||u_k + axis||) against the leading eigenvector.
  double collinearity_residual = 0.0;
};

/// Factorization of A_u used for lift solves.
struct GramSolve {
  Vector w;
  double condition_number = 0.0;  ///< 1 / rcond of the LDLT factorization
  double residual = 0.0;          ///< ||A_u w - rhs||
  bool restricted = false;        ///< solved on the orthogonal complement of the axis
};

inline constexpr double kDefaultTolSingularRel = 1e-8;

Vector endpoint(const Configuration& u);

/// S_u(t), integral of u over [0, t].
/// @throws ValidationError for t outside [0, L].
Vector snake_shape(const Configuration& u, double t);

/// Head positions S_u(s_i) at the partition knots (N + 1 points).
Matrix knot_points(const Configuration& u);

/// Tangent map of E: the integral of v over [0, L].
/// @throws StructuralError if v is not based at u.
Vector pushforward(const Configuration& u, const TangentField& v);

GramData gram(const Configuration& u);

/// Default absolute threshold 1e-8 L.
double default_tol_singular(const Configuration& u);

SingularityReport singularity(const Configuration& u, double tol_singular);
SingularityReport singularity(const Configuration& u, const GramData& g, double tol_singular);

/**
 * Solves A_u w = rhs. At regular configurations (margin > tol_singular) a
 * plain LDLT solve; at singular ones the solve is restricted to the
 * orthogonal complement of the axis.
 *
 * @throws UncontrollableDirectionError at a singular configuration when rhs
 * has a component along the axis larger than `tol_axis * (1 + ||rhs||)`.
 */
GramSolve solve_gram(const Configuration& u, const GramData& g, const Vector& rhs,
                     double tol_singular, double tol_axis = 1e-9);

}  // namespace charm

#endif  // CHARM_ENDPOINT_MAP_HPP_
