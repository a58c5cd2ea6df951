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

#include "charm/endpoint_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "charm/errors.hpp"

namespace charm {
namespace {

// Integral over [a, t] of the piecewise-linear interpolant through the
// trapezoid nodes of one segment.
Vector partial_trapezoid(const Configuration& u, int segment, double t) {
  const QuadratureRule& rule = u.rule();
  const int first = rule.first_node(segment);
  const int m = rule.nodes_per_segment();
  Vector acc = Vector::Zero(u.dimension());
  for (int k = 0; k + 1 < m; ++k) {
    const double a = rule.node(first + k);
    const double b = rule.node(first + k + 1);
    if (t <= a) break;
    const auto ua = u.sample(first + k);
    const auto ub = u.sample(first + k + 1);
    if (t >= b) {
      acc += 0.5 * (b - a) * (ua + ub);
    } else {
      const double theta = (t - a) / (b - a);
      const Vector ut = (1.0 - theta) * ua + theta * ub;
      acc += 0.5 * (t - a) * (ua + ut);
      break;
    }
  }
  return acc;
}

// Integral over [a, t] of the Lagrange interpolant through the Gauss nodes of
// one segment, using the same Gauss rule mapped to [a, t].
Vector partial_gauss(const Configuration& u, int segment, double t) {
  const QuadratureRule& rule = u.rule();
  const int first = rule.first_node(segment);
  const int m = rule.nodes_per_segment();
  const double a = rule.partition().knot(segment);
  const double l = rule.partition().segment_length(segment);
  const double scale = (t - a) / l;
  Vector acc = Vector::Zero(u.dimension());
  for (int q = 0; q < m; ++q) {
    const double x = a + (rule.node(first + q) - a) * scale;
    Vector value = Vector::Zero(u.dimension());
    for (int k = 0; k < m; ++k) {
      double basis = 1.0;
      for (int j = 0; j < m; ++j) {
        if (j != k) basis *= (x - rule.node(first + j)) / (rule.node(first + k) - rule.node(first + j));
      }
      value += basis * u.sample(first + k);
    }
    acc += rule.weight(first + q) * scale * value;
  }
  return acc;
}

Vector segment_integral(const Configuration& u, int segment) {
  const QuadratureRule& rule = u.rule();
  const int first = rule.first_node(segment);
  const int m = rule.nodes_per_segment();
  return u.values().middleCols(first, m) * rule.weights().segment(first, m);
}

void normalize_sign(Eigen::Ref<Vector> v) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

}  // namespace

Vector endpoint(const Configuration& u) { return integrate_field(u); }

Vector snake_shape(const Configuration& u, double t) {
  const Partition& p = u.partition();
  if (!(t >= 0.0 && t <= p.length())) {
    throw ValidationError("t", "snake_shape parameter " + std::to_string(t) + " outside [0, L]");
  }
  if (t == p.length()) return endpoint(u);
  Vector acc = Vector::Zero(u.dimension());
  for (int i = 0; i < p.num_segments(); ++i) {
    if (t >= p.knot(i + 1)) {
      acc += segment_integral(u, i);
      continue;
    }
    if (t > p.knot(i)) {
      switch (u.rule().scheme()) {
        case QuadratureScheme::kSegmentExact:
          acc += (t - p.knot(i)) * u.sample(i);
          break;
        case QuadratureScheme::kTrapezoid:
          acc += partial_trapezoid(u, i, t);
          break;
        case QuadratureScheme::kGaussLegendre:
          acc += partial_gauss(u, i, t);
          break;
      }
    }
    break;
  }
  return acc;
}

Matrix knot_points(const Configuration& u) {
  const int n = u.partition().num_segments();
  Matrix pts = Matrix::Zero(u.dimension(), n + 1);
  for (int i = 0; i < n; ++i) pts.col(i + 1) = pts.col(i) + segment_integral(u, i);
  return pts;
}

Vector pushforward(const Configuration& u, const TangentField& v) {
  if (!v.base().same_point(u)) throw StructuralError("pushforward: field is not based at u");
  return integrate_field(v);
}

GramData gram(const Configuration& u) {
  GramData g;
  const Matrix& values = u.values();
  g.length = u.length();
  g.gamma = values * u.rule().weights().asDiagonal() * values.transpose();
  g.gamma = 0.5 * (g.gamma + g.gamma.transpose());
  const int d = u.dimension();
  g.a_op = g.length * Matrix::Identity(d, d) - g.gamma;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(g.gamma);
  // Eigen returns ascending order.
  g.eigenvalues = eig.eigenvalues().reverse();
  g.eigenvectors = eig.eigenvectors().rowwise().reverse();
  for (int k = 0; k < d; ++k) normalize_sign(g.eigenvectors.col(k));
  g.margin = g.length - g.eigenvalues(0);
  return g;
}

double default_tol_singular(const Configuration& u) { return kDefaultTolSingularRel * u.length(); }

SingularityReport singularity(const Configuration& u, const GramData& g, double tol_singular) {
  SingularityReport r;
  r.margin = g.margin;
  r.is_singular = g.margin <= tol_singular;
  const Vector axis = g.eigenvectors.col(0);
  double residual = 0.0;
  for (int k = 0; k < u.num_samples(); ++k) {
    const auto x = u.sample(k);
    residual = std::max(residual, std::min((x - axis).norm(), (x + axis).norm()));
  }
  r.collinearity_residual = residual;
  if (r.is_singular) r.axis = axis;
  return r;
}

SingularityReport singularity(const Configuration& u, double tol_singular) {
  return singularity(u, gram(u), tol_singular);
}

GramSolve solve_gram(const Configuration& u, const GramData& g, const Vector& rhs,
                     double tol_singular, double tol_axis) {
  if (rhs.size() != u.dimension()) throw StructuralError("solve_gram: rhs dimension mismatch");
  GramSolve out;
  if (g.margin > tol_singular) {
    Eigen::LDLT<Matrix> ldlt(g.a_op);
    out.w = ldlt.solve(rhs);
    const double rcond = ldlt.rcond();
    out.condition_number = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    out.residual = (g.a_op * out.w - rhs).norm();
    return out;
  }

  const Vector axis = g.eigenvectors.col(0);
  const double along = axis.dot(rhs);
  if (std::abs(along) > tol_axis * (1.0 + rhs.norm())) {
    throw UncontrollableDirectionError(
        "head velocity has component " + std::to_string(along) + " along the singular axis", axis);
  }
  // A_u q_k = (L - lambda_k) q_k; skip the axis (k = 0).
  const int d = u.dimension();
  out.w = Vector::Zero(d);
  double smallest = std::numeric_limits<double>::infinity();
  double largest = 0.0;
  for (int k = 1; k < d; ++k) {
    const double mu = g.length - g.eigenvalues(k);
    smallest = std::min(smallest, mu);
    largest = std::max(largest, mu);
    out.w += (g.eigenvectors.col(k).dot(rhs) / mu) * g.eigenvectors.col(k);
  }
  out.condition_number = largest / smallest;
  out.residual = (g.a_op * out.w - (rhs - along * axis)).norm();
  out.restricted = true;
  return out;
}

}  // namespace charm
