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

#include "charm/poly_field.hpp"

#include <cmath>

#include "charm/errors.hpp"

namespace charm {

ScalarPoly ScalarPoly::constant(int d, double c) {
  ScalarPoly p(d);
  if (c != 0.0) p.terms_[Exponents(d, 0)] = c;
  return p;
}

ScalarPoly ScalarPoly::coordinate(int d, int i) {
  ScalarPoly p(d);
  Exponents e(d, 0);
  e[i] = 1;
  p.terms_[e] = 1.0;
  return p;
}

void ScalarPoly::prune() {
  std::erase_if(terms_, [](const auto& kv) { return kv.second == 0.0; });
}

ScalarPoly ScalarPoly::derivative(int i) const {
  ScalarPoly out(d_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponents f = e;
    f[i] -= 1;
    out.terms_[f] += c * e[i];
  }
  out.prune();
  return out;
}

double ScalarPoly::evaluate(const Eigen::Ref<const Vector>& x) const {
  double acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (int i = 0; i < d_; ++i) {
      for (int p = 0; p < e[i]; ++p) m *= x(i);
    }
    acc += m;
  }
  return acc;
}

ScalarPoly& ScalarPoly::operator+=(const ScalarPoly& other) {
  for (const auto& [e, c] : other.terms_) terms_[e] += c;
  prune();
  return *this;
}

ScalarPoly ScalarPoly::operator+(const ScalarPoly& other) const {
  ScalarPoly out = *this;
  out += other;
  return out;
}

ScalarPoly ScalarPoly::operator-(const ScalarPoly& other) const { return *this + other * -1.0; }

ScalarPoly ScalarPoly::operator*(const ScalarPoly& other) const {
  ScalarPoly out(d_);
  for (const auto& [e, c] : terms_) {
    for (const auto& [f, k] : other.terms_) {
      Exponents g(d_);
      for (int i = 0; i < d_; ++i) g[i] = e[i] + f[i];
      out.terms_[g] += c * k;
    }
  }
  out.prune();
  return out;
}

ScalarPoly ScalarPoly::operator*(double c) const {
  ScalarPoly out(d_);
  if (c == 0.0) return out;
  for (const auto& [e, k] : terms_) out.terms_[e] = k * c;
  return out;
}

PolyField::PolyField(int d) : components_(d, ScalarPoly(d)) {}

PolyField PolyField::frame(int d, int i) {
  PolyField f(d);
  const ScalarPoly xi = ScalarPoly::coordinate(d, i);
  for (int k = 0; k < d; ++k) {
    f.components_[k] = xi * ScalarPoly::coordinate(d, k) * -1.0;
    if (k == i) f.components_[k] += ScalarPoly::constant(d, 1.0);
  }
  return f;
}

PolyField PolyField::psi(const Vector& sigma, const Vector& xi) {
  const int d = static_cast<int>(sigma.size());
  if (xi.size() != d * (d - 1) / 2) throw StructuralError("PolyField::psi: xi size mismatch");
  PolyField out(d);
  for (int i = 0; i < d; ++i) {
    if (sigma(i) != 0.0) out = out + frame(d, i) * sigma(i);
  }
  int p = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j, ++p) {
      if (xi(p) != 0.0) out = out + lie_bracket(frame(d, i), frame(d, j)) * xi(p);
    }
  }
  return out;
}

Vector PolyField::evaluate(const Eigen::Ref<const Vector>& x) const {
  Vector out(dimension());
  for (int k = 0; k < dimension(); ++k) out(k) = components_[k].evaluate(x);
  return out;
}

Matrix PolyField::evaluate(const Configuration& u) const {
  if (u.dimension() != dimension()) throw StructuralError("PolyField::evaluate: dimension mismatch");
  Matrix out(dimension(), u.num_samples());
  for (int s = 0; s < u.num_samples(); ++s) out.col(s) = evaluate(Vector(u.sample(s)));
  return out;
}

PolyField PolyField::operator+(const PolyField& other) const {
  PolyField out = *this;
  for (int k = 0; k < dimension(); ++k) out.components_[k] += other.components_[k];
  return out;
}

PolyField PolyField::operator-(const PolyField& other) const { return *this + other * -1.0; }

PolyField PolyField::operator*(double c) const {
  PolyField out(dimension());
  for (int k = 0; k < dimension(); ++k) out.components_[k] = components_[k] * c;
  return out;
}

PolyField lie_bracket(const PolyField& f, const PolyField& g) {
  const int d = f.dimension();
  if (g.dimension() != d) throw StructuralError("lie_bracket: dimension mismatch");
  PolyField out(d);
  for (int k = 0; k < d; ++k) {
    ScalarPoly acc(d);
    for (int m = 0; m < d; ++m) {
      acc += f.components_[k].derivative(m) * g.components_[m];
      acc += g.components_[k].derivative(m) * f.components_[m] * -1.0;
    }
    out.components_[k] = acc;
  }
  return out;
}

}  // namespace charm
