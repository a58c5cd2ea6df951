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

#ifndef CHARM_GEOMETRY_HPP_
#define CHARM_GEOMETRY_HPP_

/**
 * @file
 * Configuration-space data model: partitions of [0, L], quadrature rules,
 * configurations (piecewise maps into the unit sphere of R^d) and tangent
 * fields along them, with the sup and L2 norms.
 *
 * Storage layout: every configuration keeps a d x S matrix whose column k is
 * the value u(s_k) at quadrature node k. An articulated arm has S = N (one
 * column per segment, weight = segment length); a sampled snake has M nodes
 * per segment and nodes are never shared across knots.
 */

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace charm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultTolUnit = 1e-12;
inline constexpr double kDefaultTolOrth = 1e-10;

/// Knots 0 = s_0 < s_1 < ... < s_N = L.
class Partition {
 public:
  explicit Partition(std::vector<double> knots);

  static Partition uniform(int segments, double length);
  static Partition from_lengths(std::span<const double> lengths);

  int num_segments() const { return static_cast<int>(knots_.size()) - 1; }
  double length() const { return knots_.back(); }
  double knot(int i) const { return knots_[i]; }
  double segment_length(int i) const { return knots_[i + 1] - knots_[i]; }
  const std::vector<double>& knots() const { return knots_; }

  bool operator==(const Partition&) const = default;

 private:
  std::vector<double> knots_;
};

enum class QuadratureScheme { kSegmentExact, kTrapezoid, kGaussLegendre };

/// Nodes and positive weights per segment; weights of a segment sum to its
/// length, so piecewise-constant integrands are integrated exactly.
class QuadratureRule {
 public:
  static QuadratureRule segment_exact(Partition partition);
  static QuadratureRule trapezoid(Partition partition, int nodes_per_segment);
  static QuadratureRule gauss_legendre(Partition partition, int nodes_per_segment);

  QuadratureScheme scheme() const { return scheme_; }
  const Partition& partition() const { return partition_; }
  int nodes_per_segment() const { return nodes_per_segment_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  double node(int k) const { return nodes_[k]; }
  double weight(int k) const { return weights_(k); }
  const Vector& weights() const { return weights_; }
  int segment_of(int k) const { return k / nodes_per_segment_; }
  int first_node(int segment) const { return segment * nodes_per_segment_; }

  bool operator==(const QuadratureRule& other) const;

 private:
  QuadratureRule(QuadratureScheme scheme, Partition partition, int nodes_per_segment);

  QuadratureScheme scheme_;
  Partition partition_;
  int nodes_per_segment_;
  std::vector<double> nodes_;
  Vector weights_;
};

enum class Representation { kArm, kSampled };

/**
 * A point of the configuration space: unit vectors u(s_k) at the nodes of a
 * quadrature rule. Immutable; copies share storage.
 */
class Configuration {
 public:
  /// One unit vector per segment, given as the columns of a d x N matrix.
  static Configuration arm(Partition partition, const Matrix& segments,
                           double tol_unit = kDefaultTolUnit);

  /// Explicit samples, one column per node of `rule`.
  static Configuration sampled(QuadratureRule rule, const Matrix& samples,
                               double tol_unit = kDefaultTolUnit);

  /// Evaluates `curve(segment, s)` at every node. The segment index lets the
  /// caller describe curves that jump at knots.
  static Configuration sampled(QuadratureRule rule,
                               const std::function<Vector(int, double)>& curve,
                               double tol_unit = kDefaultTolUnit);

  Representation representation() const { return representation_; }
  int dimension() const { return static_cast<int>(values_->rows()); }
  int num_samples() const { return static_cast<int>(values_->cols()); }
  const Matrix& values() const { return *values_; }
  auto sample(int k) const { return values_->col(k); }
  const QuadratureRule& rule() const { return *rule_; }
  const Partition& partition() const { return rule_->partition(); }
  double length() const { return partition().length(); }

  /// Same layout, new values divided by their norms.
  /// @throws DegenerateConfigurationError if a column has norm below 0.5.
  Configuration retract(const Matrix& values) const;

  /// Same layout, values validated against `tol_unit` (no normalization).
  Configuration with_values(const Matrix& values, double tol_unit = kDefaultTolUnit) const;

  bool same_layout(const Configuration& other) const;
  /// Same layout and values equal within `tol` (entrywise).
  bool same_point(const Configuration& other, double tol = 0.0) const;

 private:
  Configuration(Representation representation, std::shared_ptr<const QuadratureRule> rule,
                std::shared_ptr<const Matrix> values)
      : representation_(representation), rule_(std::move(rule)), values_(std::move(values)) {}

  Representation representation_;
  std::shared_ptr<const QuadratureRule> rule_;
  std::shared_ptr<const Matrix> values_;
};

/// A velocity field along a configuration, pointwise orthogonal to it.
class TangentField {
 public:
  /// Removes the normal component when it is at most `tol_orth` per sample.
  /// @throws ValidationError if some sample is further from tangency.
  static TangentField make(Configuration base, Matrix values, double tol_orth = kDefaultTolOrth);

  /// Unconditional pointwise projection onto the tangent spaces.
  static TangentField project(Configuration base, const Matrix& values);

  /// Caller guarantees pointwise tangency (closed-form fields).
  static TangentField unchecked(Configuration base, Matrix values);

  static TangentField zero(const Configuration& base);

  const Configuration& base() const { return base_; }
  const Matrix& values() const { return values_; }
  auto sample(int k) const { return values_.col(k); }

  TangentField operator+(const TangentField& other) const;
  TangentField operator-(const TangentField& other) const;
  TangentField operator*(double scale) const;

 private:
  TangentField(Configuration base, Matrix values) : base_(std::move(base)), values_(std::move(values)) {}

  Configuration base_;
  Matrix values_;
};

inline TangentField operator*(double scale, const TangentField& v) { return v * scale; }

/// Quadrature approximation of the integral over [0, L] of the columns.
/// @throws StructuralError if the column count differs from the node count.
Vector integrate_field(const Matrix& values, const QuadratureRule& rule);
Vector integrate_field(const TangentField& v);
Vector integrate_field(const Configuration& u);

double sup_norm(const TangentField& v);
double l2_inner(const TangentField& v, const TangentField& w);
double l2_norm(const TangentField& v);

/// Largest pointwise chordal distance between two configurations.
double sup_distance(const Configuration& u, const Configuration& v);

/// Idempotent retraction onto the sphere, see Configuration::retract.
Configuration renormalize(const Configuration& u);

/// Per segment, M copies of the segment vector on a trapezoid (default) or
/// Gauss-Legendre rule.
Configuration arm_to_sampled(const Configuration& arm, int nodes_per_segment,
                             QuadratureScheme scheme = QuadratureScheme::kTrapezoid);

/// Largest | ||u(s_k)|| - 1 | over the stored samples.
double unit_defect(const Matrix& values);

}  // namespace charm

#endif  // CHARM_GEOMETRY_HPP_
