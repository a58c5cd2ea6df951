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

#include "charm/horizontal_frame.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "charm/errors.hpp"

namespace charm {
namespace {

void check_index(int i, int d) {
  if (i < 0 || i >= d) {
    throw StructuralError("frame index " + std::to_string(i) + " out of range for d = " +
                          std::to_string(d));
  }
}

void check_gvector(const GVector& a, int d) {
  if (a.sigma.size() != d || a.xi.size() != num_pairs(d)) {
    throw StructuralError("GVector dimension does not match the configuration");
  }
}

// Antisymmetric K = sum xi_ij (b_i b_j^T - b_j b_i^T) for basis columns b.
Matrix antisymmetric_from_xi(const Vector& xi, int d, const Matrix* basis) {
  Matrix k = Matrix::Zero(d, d);
  for (int p = 0; p < xi.size(); ++p) {
    const auto [i, j] = pair_at(p, d);
    k(i, j) += xi(p);
    k(j, i) -= xi(p);
  }
  if (basis != nullptr) k = (*basis) * k * basis->transpose();
  return k;
}

// Collapses a piecewise-constant sampled configuration to its arm.
Configuration collapse_to_arm(const Configuration& u) {
  const QuadratureRule& rule = u.rule();
  const int n = u.partition().num_segments();
  Matrix segments(u.dimension(), n);
  for (int i = 0; i < n; ++i) {
    const int first = rule.first_node(i);
    segments.col(i) = u.sample(first);
    for (int k = 1; k < rule.nodes_per_segment(); ++k) {
      if ((u.sample(first + k) - u.sample(first)).norm() > 1e-12) {
        throw StructuralError("arm tangent model requires a piecewise-constant configuration");
      }
    }
  }
  return Configuration::arm(u.partition(), segments, 1e-10);
}

}  // namespace

int pair_index(int i, int j, int d) {
  if (!(0 <= i && i < j && j < d)) throw StructuralError("pair index requires 0 <= i < j < d");
  return i * d - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<int, int> pair_at(int index, int d) {
  int i = 0;
  int row = d - 1;
  while (index >= row) {
    index -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + index};
}

GVector GVector::zero(int d) { return GVector{Vector::Zero(d), Vector::Zero(num_pairs(d))}; }

GVector GVector::epsilon(int d, int i) {
  check_index(i, d);
  GVector a = zero(d);
  a.sigma(i) = 1.0;
  return a;
}

GVector GVector::omega(int d, int i, int j) {
  GVector a = zero(d);
  if (i < j) {
    a.xi(pair_index(i, j, d)) = 1.0;
  } else {
    a.xi(pair_index(j, i, d)) = -1.0;
  }
  return a;
}

GVector GVector::from_stacked(int d, const Vector& stacked) {
  if (stacked.size() != d + num_pairs(d)) throw StructuralError("GVector: bad stacked size");
  return GVector{stacked.head(d), stacked.tail(num_pairs(d))};
}

Vector GVector::stacked() const {
  Vector out(size());
  out << sigma, xi;
  return out;
}

GVector GVector::operator+(const GVector& other) const { return {sigma + other.sigma, xi + other.xi}; }
GVector GVector::operator-(const GVector& other) const { return {sigma - other.sigma, xi - other.xi}; }
GVector GVector::operator*(double scale) const { return {sigma * scale, xi * scale}; }

TangentField frame_field(const Configuration& u, int i) {
  check_index(i, u.dimension());
  Matrix values = (-(u.values().array().rowwise() * u.values().row(i).array())).matrix();
  values.row(i).array() += 1.0;
  return TangentField::unchecked(u, std::move(values));
}

TangentField horizontal_gradient(const Configuration& u, const Vector& g) {
  if (g.size() != u.dimension()) throw StructuralError("horizontal_gradient: dimension mismatch");
  const Eigen::RowVectorXd along = g.transpose() * u.values();
  Matrix values = (-(u.values().array().rowwise() * along.array())).matrix();
  values.colwise() += g;
  return TangentField::unchecked(u, std::move(values));
}

TangentField bracket_field(const Configuration& u, int i, int j, bool allow_equal) {
  const int d = u.dimension();
  check_index(i, d);
  check_index(j, d);
  if (i == j) {
    if (!allow_equal) throw StructuralError("bracket_field requires i != j");
    return TangentField::zero(u);
  }
  const Matrix ei = frame_field(u, i).values();
  const Matrix ej = frame_field(u, j).values();
  Matrix values = (ei.array().rowwise() * u.values().row(j).array() -
                   ej.array().rowwise() * u.values().row(i).array())
                      .matrix();
  return TangentField::unchecked(u, std::move(values));
}

TangentField psi(const Configuration& u, const GVector& a) {
  check_gvector(a, u.dimension());
  const int d = u.dimension();
  const Matrix k = antisymmetric_from_xi(a.xi, d, nullptr);
  // P_u (sigma + K u): the K u part is already tangent.
  Matrix values = horizontal_gradient(u, a.sigma).values() + k * u.values();
  return TangentField::unchecked(u, std::move(values));
}

TangentField psi(const Configuration& u, const GVector& a, const Matrix& basis) {
  check_gvector(a, u.dimension());
  const int d = u.dimension();
  if (basis.rows() != d || basis.cols() != d) throw StructuralError("psi: basis must be d x d");
  const Matrix k = antisymmetric_from_xi(a.xi, d, &basis);
  Matrix values = horizontal_gradient(u, basis * a.sigma).values() + k * u.values();
  return TangentField::unchecked(u, std::move(values));
}

Vector stack_weighted(const TangentField& v) {
  const Configuration& u = v.base();
  const int d = u.dimension();
  Vector out(d * u.num_samples());
  for (int k = 0; k < u.num_samples(); ++k) {
    out.segment(k * d, d) = std::sqrt(u.rule().weight(k)) * v.sample(k);
  }
  return out;
}

Matrix unstack_weighted(const Configuration& u, const Vector& stacked) {
  const int d = u.dimension();
  if (stacked.size() != d * u.num_samples()) throw StructuralError("unstack_weighted: size mismatch");
  Matrix values(d, u.num_samples());
  for (int k = 0; k < u.num_samples(); ++k) {
    values.col(k) = stacked.segment(k * d, d) / std::sqrt(u.rule().weight(k));
  }
  return values;
}

Matrix psi_columns(const Configuration& u, const Matrix* basis) {
  const int d = u.dimension();
  const int cols = d + num_pairs(d);
  Matrix out(d * u.num_samples(), cols);
  for (int c = 0; c < cols; ++c) {
    Vector e = Vector::Zero(cols);
    e(c) = 1.0;
    const GVector a = GVector::from_stacked(d, e);
    out.col(c) = stack_weighted(basis ? psi(u, a, *basis) : psi(u, a));
  }
  return out;
}

Matrix column_space(const Matrix& a, double tol_rank) {
  if (a.cols() == 0 || a.rows() == 0) return Matrix(a.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  int rank = 0;
  const double cutoff = tol_rank * s(0);
  while (rank < s.size() && s(rank) > cutoff && s(rank) > 1e-300) ++rank;
  return svd.matrixU().leftCols(rank);
}

Matrix v_subspace(const Configuration& u, double tol_rank) {
  const int d = u.dimension();
  const int n = u.num_samples();
  if (n < 2) return Matrix(d, 0);
  Matrix diffs = u.values().rightCols(n - 1).colwise() - u.values().col(0);
  if (diffs.cwiseAbs().maxCoeff() <= 1e-13) return Matrix(d, 0);
  return column_space(diffs, tol_rank);
}

int predicted_dbar_rank(int d, int v_dim) {
  const int free = d - v_dim;
  const int kernel = free * (free - 1) / 2 + (v_dim <= 1 ? 1 : 0);
  return d + num_pairs(d) - kernel;
}

RankReport dbar_rank(const Configuration& u_in, TangentModel model, double tol_rank,
                     std::optional<double> tol_singular) {
  Configuration u = u_in;
  if (model == TangentModel::kArm && u.representation() == Representation::kSampled) {
    u = collapse_to_arm(u);
  } else if (model == TangentModel::kSampled && u.representation() == Representation::kArm) {
    u = arm_to_sampled(u, 2);
  }
  const int d = u.dimension();
  const int cols = d + num_pairs(d);

  RankReport r;
  r.model = model;
  r.v_dim = static_cast<int>(v_subspace(u, tol_rank).cols());
  r.singular = singularity(u, tol_singular.value_or(default_tol_singular(u))).is_singular;
  r.predicted_rank = predicted_dbar_rank(d, r.v_dim);

  const Matrix columns = psi_columns(u);
  Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  r.singular_values = Vector::Zero(cols);
  r.singular_values.head(s.size()) = s;
  const double cutoff = tol_rank * (s.size() > 0 ? s(0) : 0.0);
  r.rank = 0;
  while (r.rank < s.size() && s(r.rank) > cutoff) ++r.rank;
  for (int c = r.rank; c < cols; ++c) {
    r.kernel_basis.push_back(GVector::from_stacked(d, svd.matrixV().col(c)));
  }
  return r;
}

TangentField horizontal_projection(const Configuration& u, const TangentField& v,
                                   std::optional<double> tol_singular) {
  if (!v.base().same_point(u)) throw StructuralError("horizontal_projection: field not based at u");
  const GramData g = gram(u);
  const Vector rhs = pushforward(u, v);
  const GramSolve solve = solve_gram(u, g, rhs, tol_singular.value_or(default_tol_singular(u)));
  return horizontal_gradient(u, solve.w);
}

double max_principal_angle_sin(const Matrix& q1, const Matrix& q2) {
  if (q1.cols() != q2.cols() || q1.rows() != q2.rows()) return 1.0;
  if (q1.cols() == 0) return 0.0;
  const Matrix residual = q2 - q1 * (q1.transpose() * q2);
  Eigen::JacobiSVD<Matrix> svd(residual);
  return std::min(1.0, svd.singularValues()(0));
}

}  // namespace charm
