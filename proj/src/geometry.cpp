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

#include "charm/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "charm/errors.hpp"

namespace charm {
namespace {

// Nodes and weights of the M-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre_reference(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pm = (m == 1) ? z : p1;
      const double pm1 = (m == 1) ? 1.0 : p0;
      dp = m * (z * pm - pm1) / (z * z - 1.0);
      const double dz = pm / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

void check_unit(const Matrix& values, double tol_unit, const Partition& partition,
                int nodes_per_segment) {
  for (int k = 0; k < values.cols(); ++k) {
    const double n = values.col(k).norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > tol_unit) {
      const int segment = k / nodes_per_segment + 1;
      throw ValidationError("segment " + std::to_string(segment),
                            "vector norm " + std::to_string(n) + " is not 1 (sample " +
                                std::to_string(k) + " of " +
                                std::to_string(partition.num_segments()) + " segments)");
    }
  }
}

void check_same_base(const TangentField& a, const TangentField& b) {
  if (!a.base().same_point(b.base())) {
    throw StructuralError("tangent fields are based at different configurations");
  }
}

}  // namespace

Partition::Partition(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw ValidationError("partition", "needs at least two knots");
  if (knots_.front() != 0.0) throw ValidationError("partition", "first knot must be 0");
  for (size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) {
      throw ValidationError("partition", "knots must be strictly increasing");
    }
  }
}

Partition Partition::uniform(int segments, double length) {
  if (segments < 1 || !(length > 0.0)) throw ValidationError("partition", "bad uniform partition");
  std::vector<double> knots(segments + 1);
  for (int i = 0; i <= segments; ++i) knots[i] = length * i / segments;
  knots.back() = length;
  return Partition(std::move(knots));
}

Partition Partition::from_lengths(std::span<const double> lengths) {
  std::vector<double> knots{0.0};
  for (double l : lengths) knots.push_back(knots.back() + l);
  return Partition(std::move(knots));
}

QuadratureRule::QuadratureRule(QuadratureScheme scheme, Partition partition, int nodes_per_segment)
    : scheme_(scheme), partition_(std::move(partition)), nodes_per_segment_(nodes_per_segment) {}

QuadratureRule QuadratureRule::segment_exact(Partition partition) {
  QuadratureRule rule(QuadratureScheme::kSegmentExact, std::move(partition), 1);
  const int n = rule.partition_.num_segments();
  rule.weights_.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes_.push_back(0.5 * (rule.partition_.knot(i) + rule.partition_.knot(i + 1)));
    rule.weights_(i) = rule.partition_.segment_length(i);
  }
  return rule;
}

QuadratureRule QuadratureRule::trapezoid(Partition partition, int nodes_per_segment) {
  if (nodes_per_segment < 2) throw ValidationError("samples_per_segment", "must be >= 2");
  QuadratureRule rule(QuadratureScheme::kTrapezoid, std::move(partition), nodes_per_segment);
  const int n = rule.partition_.num_segments();
  const int m = nodes_per_segment;
  rule.weights_.resize(n * m);
  for (int i = 0; i < n; ++i) {
    const double a = rule.partition_.knot(i);
    const double l = rule.partition_.segment_length(i);
    const double h = l / (m - 1);
    for (int k = 0; k < m; ++k) {
      rule.nodes_.push_back(k == m - 1 ? rule.partition_.knot(i + 1) : a + k * h);
      rule.weights_(i * m + k) = (k == 0 || k == m - 1) ? 0.5 * h : h;
    }
  }
  return rule;
}

QuadratureRule QuadratureRule::gauss_legendre(Partition partition, int nodes_per_segment) {
  if (nodes_per_segment < 2) throw ValidationError("samples_per_segment", "must be >= 2");
  QuadratureRule rule(QuadratureScheme::kGaussLegendre, std::move(partition), nodes_per_segment);
  std::vector<double> x, w;
  gauss_legendre_reference(nodes_per_segment, x, w);
  const int n = rule.partition_.num_segments();
  const int m = nodes_per_segment;
  rule.weights_.resize(n * m);
  for (int i = 0; i < n; ++i) {
    const double a = rule.partition_.knot(i);
    const double l = rule.partition_.segment_length(i);
    for (int k = 0; k < m; ++k) {
      rule.nodes_.push_back(a + 0.5 * l * (x[k] + 1.0));
      rule.weights_(i * m + k) = 0.5 * l * w[k];
    }
  }
  return rule;
}

bool QuadratureRule::operator==(const QuadratureRule& other) const {
  return scheme_ == other.scheme_ && nodes_per_segment_ == other.nodes_per_segment_ &&
         partition_ == other.partition_;
}

Configuration Configuration::arm(Partition partition, const Matrix& segments, double tol_unit) {
  if (segments.rows() < 2) throw ValidationError("dimension", "must be >= 2");
  if (segments.cols() != partition.num_segments()) {
    throw StructuralError("arm needs one vector per segment");
  }
  check_unit(segments, tol_unit, partition, 1);
  auto rule = std::make_shared<const QuadratureRule>(QuadratureRule::segment_exact(std::move(partition)));
  return Configuration(Representation::kArm, std::move(rule), std::make_shared<const Matrix>(segments));
}

Configuration Configuration::sampled(QuadratureRule rule, const Matrix& samples, double tol_unit) {
  if (samples.rows() < 2) throw ValidationError("dimension", "must be >= 2");
  if (samples.cols() != rule.num_nodes()) {
    throw StructuralError("sample count does not match the quadrature rule");
  }
  check_unit(samples, tol_unit, rule.partition(), rule.nodes_per_segment());
  const Representation rep = rule.scheme() == QuadratureScheme::kSegmentExact
                                 ? Representation::kArm
                                 : Representation::kSampled;
  return Configuration(rep, std::make_shared<const QuadratureRule>(std::move(rule)),
                       std::make_shared<const Matrix>(samples));
}

Configuration Configuration::sampled(QuadratureRule rule,
                                     const std::function<Vector(int, double)>& curve,
                                     double tol_unit) {
  Vector first = curve(0, rule.node(0));
  Matrix samples(first.size(), rule.num_nodes());
  for (int k = 0; k < rule.num_nodes(); ++k) samples.col(k) = curve(rule.segment_of(k), rule.node(k));
  return sampled(std::move(rule), samples, tol_unit);
}

Configuration Configuration::retract(const Matrix& values) const {
  if (values.rows() != values_->rows() || values.cols() != values_->cols()) {
    throw StructuralError("retract: layout mismatch");
  }
  Matrix out = values;
  for (int k = 0; k < out.cols(); ++k) {
    const double n = out.col(k).norm();
    if (!(n >= 0.5)) {
      throw DegenerateConfigurationError("sample " + std::to_string(k) + " has norm " +
                                         std::to_string(n) + " < 0.5");
    }
    out.col(k) /= n;
  }
  return Configuration(representation_, rule_, std::make_shared<const Matrix>(std::move(out)));
}

Configuration Configuration::with_values(const Matrix& values, double tol_unit) const {
  if (values.rows() != values_->rows() || values.cols() != values_->cols()) {
    throw StructuralError("with_values: layout mismatch");
  }
  check_unit(values, tol_unit, partition(), rule_->nodes_per_segment());
  return Configuration(representation_, rule_, std::make_shared<const Matrix>(values));
}

bool Configuration::same_layout(const Configuration& other) const {
  if (rule_ == other.rule_) return values_->rows() == other.values_->rows();
  return representation_ == other.representation_ && *rule_ == *other.rule_ &&
         values_->rows() == other.values_->rows();
}

bool Configuration::same_point(const Configuration& other, double tol) const {
  if (!same_layout(other)) return false;
  if (values_ == other.values_) return true;
  return (*values_ - *other.values_).cwiseAbs().maxCoeff() <= tol;
}

TangentField TangentField::make(Configuration base, Matrix values, double tol_orth) {
  if (values.rows() != base.dimension() || values.cols() != base.num_samples()) {
    throw StructuralError("tangent field layout does not match its base");
  }
  for (int k = 0; k < values.cols(); ++k) {
    const auto u = base.sample(k);
    const double normal = u.dot(values.col(k));
    if (!(std::abs(normal) <= tol_orth)) {
      throw ValidationError("sample " + std::to_string(k),
                            "not tangent: <u,v> = " + std::to_string(normal));
    }
    values.col(k) -= normal * u;
  }
  return TangentField(std::move(base), std::move(values));
}

TangentField TangentField::project(Configuration base, const Matrix& values) {
  if (values.rows() != base.dimension() || values.cols() != base.num_samples()) {
    throw StructuralError("tangent field layout does not match its base");
  }
  Matrix out = values;
  for (int k = 0; k < out.cols(); ++k) {
    const auto u = base.sample(k);
    out.col(k) -= u.dot(out.col(k)) * u;
  }
  return TangentField(std::move(base), std::move(out));
}

TangentField TangentField::unchecked(Configuration base, Matrix values) {
  if (values.rows() != base.dimension() || values.cols() != base.num_samples()) {
    throw StructuralError("tangent field layout does not match its base");
  }
  return TangentField(std::move(base), std::move(values));
}

TangentField TangentField::zero(const Configuration& base) {
  return TangentField(base, Matrix::Zero(base.dimension(), base.num_samples()));
}

TangentField TangentField::operator+(const TangentField& other) const {
  check_same_base(*this, other);
  return TangentField(base_, values_ + other.values_);
}

TangentField TangentField::operator-(const TangentField& other) const {
  check_same_base(*this, other);
  return TangentField(base_, values_ - other.values_);
}

TangentField TangentField::operator*(double scale) const { return TangentField(base_, values_ * scale); }

Vector integrate_field(const Matrix& values, const QuadratureRule& rule) {
  if (values.cols() != rule.num_nodes()) {
    throw StructuralError("integrate_field: sampling layout does not match the quadrature rule");
  }
  return values * rule.weights();
}

Vector integrate_field(const TangentField& v) { return integrate_field(v.values(), v.base().rule()); }

Vector integrate_field(const Configuration& u) { return integrate_field(u.values(), u.rule()); }

double sup_norm(const TangentField& v) {
  if (v.values().cols() == 0) return 0.0;
  return v.values().colwise().norm().maxCoeff();
}

double l2_inner(const TangentField& v, const TangentField& w) {
  check_same_base(v, w);
  const Vector pointwise = v.values().cwiseProduct(w.values()).colwise().sum().transpose();
  return pointwise.dot(v.base().rule().weights());
}

double l2_norm(const TangentField& v) { return std::sqrt(std::max(0.0, l2_inner(v, v))); }

double sup_distance(const Configuration& u, const Configuration& v) {
  if (!u.same_layout(v)) throw StructuralError("sup_distance: layout mismatch");
  return (u.values() - v.values()).colwise().norm().maxCoeff();
}

Configuration renormalize(const Configuration& u) { return u.retract(u.values()); }

Configuration arm_to_sampled(const Configuration& arm, int nodes_per_segment, QuadratureScheme scheme) {
  if (arm.representation() != Representation::kArm) {
    throw StructuralError("arm_to_sampled expects an arm configuration");
  }
  if (nodes_per_segment < 2) throw ValidationError("samples_per_segment", "must be >= 2");
  QuadratureRule rule = scheme == QuadratureScheme::kGaussLegendre
                            ? QuadratureRule::gauss_legendre(arm.partition(), nodes_per_segment)
                            : QuadratureRule::trapezoid(arm.partition(), nodes_per_segment);
  Matrix samples(arm.dimension(), rule.num_nodes());
  for (int k = 0; k < rule.num_nodes(); ++k) samples.col(k) = arm.sample(rule.segment_of(k));
  return Configuration::sampled(std::move(rule), samples, std::numeric_limits<double>::infinity());
}

double unit_defect(const Matrix& values) {
  double worst = 0.0;
  for (int k = 0; k < values.cols(); ++k) worst = std::max(worst, std::abs(values.col(k).norm() - 1.0));
  return worst;
}

}  // namespace charm
