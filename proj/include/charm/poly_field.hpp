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

#ifndef CHARM_POLY_FIELD_HPP_
#define CHARM_POLY_FIELD_HPP_

/**
 * @file
 * Polynomial vector fields on R^d with exact differentiation. The frame
 * fields and their brackets are polynomial in the sphere point, so nested
 * brackets can be formed symbolically (no finite differences) and evaluated
 * sample by sample on a configuration.
 */

#include <map>
#include <vector>

#include "charm/geometry.hpp"

namespace charm {

class ScalarPoly {
 public:
  using Exponents = std::vector<int>;

  explicit ScalarPoly(int d) : d_(d) {}

  static ScalarPoly constant(int d, double c);
  static ScalarPoly coordinate(int d, int i);

  int dimension() const { return d_; }
  const std::map<Exponents, double>& terms() const { return terms_; }

  ScalarPoly derivative(int i) const;
  double evaluate(const Eigen::Ref<const Vector>& x) const;

  ScalarPoly& operator+=(const ScalarPoly& other);
  ScalarPoly operator+(const ScalarPoly& other) const;
  ScalarPoly operator-(const ScalarPoly& other) const;
  ScalarPoly operator*(const ScalarPoly& other) const;
  ScalarPoly operator*(double c) const;

 private:
  void prune();

  int d_;
  std::map<Exponents, double> terms_;
};

class PolyField {
 public:
  explicit PolyField(int d);

  /// e_i - x_i x.
  static PolyField frame(int d, int i);
  /// Constant-coefficient combination sum sigma_i frame_i + sum xi_ij [frame_i, frame_j].
  static PolyField psi(const Vector& sigma, const Vector& xi);

  int dimension() const { return static_cast<int>(components_.size()); }
  const ScalarPoly& component(int k) const { return components_[k]; }

  Vector evaluate(const Eigen::Ref<const Vector>& x) const;
  Matrix evaluate(const Configuration& u) const;

  PolyField operator+(const PolyField& other) const;
  PolyField operator-(const PolyField& other) const;
  PolyField operator*(double c) const;

  /// [F, G] = DF.G - DG.F, computed symbolically.
  friend PolyField lie_bracket(const PolyField& f, const PolyField& g);

 private:
  std::vector<ScalarPoly> components_;
};

PolyField lie_bracket(const PolyField& f, const PolyField& g);

}  // namespace charm

#endif  // CHARM_POLY_FIELD_HPP_
