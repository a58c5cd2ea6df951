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

#include "charm/algebroid.hpp"

#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>

#include "charm/errors.hpp"
#include "charm/poly_field.hpp"

namespace charm {
namespace {

int kron(int a, int b) { return a == b ? 1 : 0; }

// omega_ij as a combination; omega_ii = 0, omega_ji = -omega_ij.
void add_omega(std::vector<int>& dense, int d, int i, int j, int coeff) {
  if (coeff == 0 || i == j) return;
  if (i < j) {
    dense[d + pair_index(i, j, d)] += coeff;
  } else {
    dense[d + pair_index(j, i, d)] -= coeff;
  }
}

void add_eps(std::vector<int>& dense, int i, int coeff) { dense[i] += coeff; }

struct Element {
  bool is_eps;
  int i;
  int j;
};

Element element_at(int index, int d) {
  if (index < d) return {true, index, -1};
  const auto [i, j] = pair_at(index - d, d);
  return {false, i, j};
}

std::vector<int> formula_bracket(int a, int b, int d) {
  std::vector<int> dense(d + num_pairs(d), 0);
  const Element x = element_at(a, d);
  const Element y = element_at(b, d);
  if (x.is_eps && y.is_eps) {
    add_omega(dense, d, x.i, y.i, 1);
  } else if (x.is_eps && !y.is_eps) {
    add_eps(dense, y.j, kron(x.i, y.i));
    add_eps(dense, y.i, -kron(x.i, y.j));
  } else if (!x.is_eps && y.is_eps) {
    add_eps(dense, x.j, -kron(y.i, x.i));
    add_eps(dense, x.i, kron(y.i, x.j));
  } else {
    const int i = x.i, j = x.j, k = y.i, l = y.j;
    add_omega(dense, d, j, k, kron(i, l));
    add_omega(dense, d, i, l, kron(j, k));
    add_omega(dense, d, j, l, -kron(i, k));
    add_omega(dense, d, i, k, -kron(j, l));
  }
  return dense;
}

IntCombination sparse(const std::vector<int>& dense) {
  IntCombination out;
  for (int k = 0; k < static_cast<int>(dense.size()); ++k) {
    if (dense[k] != 0) out.emplace_back(k, dense[k]);
  }
  return out;
}

}  // namespace

StructureConstants::StructureConstants(int d) : d_(d), n_(d + num_pairs(d)) {
  if (d < 2) throw StructuralError("structure constants need d >= 2");
  table_.resize(static_cast<std::size_t>(n_) * n_);
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < n_; ++b) table_[a * n_ + b] = sparse(formula_bracket(a, b, d));
  }
}

std::vector<long long> StructureConstants::bracket(const std::vector<long long>& a,
                                                   const std::vector<long long>& b) const {
  std::vector<long long> out(n_, 0);
  for (int p = 0; p < n_; ++p) {
    if (a[p] == 0) continue;
    for (int q = 0; q < n_; ++q) {
      if (b[q] == 0) continue;
      for (const auto& [k, c] : table_[p * n_ + q]) out[k] += a[p] * b[q] * c;
    }
  }
  return out;
}

bool StructureConstants::is_antisymmetric() const {
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < n_; ++b) {
      IntCombination neg = bracket(b, a);
      for (auto& term : neg) term.second = -term.second;
      if (neg != bracket(a, b)) return false;
    }
  }
  return true;
}

bool StructureConstants::has_unit_coefficients() const {
  for (const auto& entry : table_) {
    for (const auto& term : entry) {
      if (std::abs(term.second) != 1) return false;
    }
  }
  return true;
}

bool StructureConstants::matches_formulas() const {
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < n_; ++b) {
      if (sparse(formula_bracket(a, b, d_)) != bracket(a, b)) return false;
    }
  }
  return true;
}

const StructureConstants& structure_constants(int d) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<StructureConstants>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[d];
  if (!slot) slot = std::make_unique<StructureConstants>(d);
  return *slot;
}

GVector g_bracket(const GVector& a, const GVector& b) {
  const int d = a.dimension();
  if (b.dimension() != d || a.xi.size() != num_pairs(d) || b.xi.size() != num_pairs(d)) {
    throw StructuralError("g_bracket: dimension mismatch");
  }
  const StructureConstants& table = structure_constants(d);
  const Vector x = a.stacked();
  const Vector y = b.stacked();
  // Summing x_p y_q - x_q y_p over p < q keeps [a, b] = -[b, a] exact.
  Vector out = Vector::Zero(table.size());
  for (int p = 0; p < table.size(); ++p) {
    for (int q = p + 1; q < table.size(); ++q) {
      const double coeff = x(p) * y(q) - x(q) * y(p);
      if (coeff == 0.0) continue;
      for (const auto& [k, c] : table.bracket(p, q)) out(k) += coeff * c;
    }
  }
  return GVector::from_stacked(d, out);
}

GVector jacobi_defect(const GVector& a, const GVector& b, const GVector& c) {
  return g_bracket(a, g_bracket(b, c)) + g_bracket(b, g_bracket(c, a)) + g_bracket(c, g_bracket(a, b));
}

JacobiReport exhaustive_jacobi(int d) {
  const StructureConstants& table = structure_constants(d);
  const int n = table.size();
  JacobiReport r;
  r.dimension = d;
  auto unit = [n](int k) {
    std::vector<long long> e(n, 0);
    e[k] = 1;
    return e;
  };
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        const auto ea = unit(a), eb = unit(b), ec = unit(c);
        const auto t1 = table.bracket(ea, table.bracket(eb, ec));
        const auto t2 = table.bracket(eb, table.bracket(ec, ea));
        const auto t3 = table.bracket(ec, table.bracket(ea, eb));
        long long worst = 0;
        for (int k = 0; k < n; ++k) worst = std::max(worst, std::llabs(t1[k] + t2[k] + t3[k]));
        ++r.triples;
        if (worst != 0) ++r.nonzero_triples;
        r.max_abs_coefficient = std::max(r.max_abs_coefficient, worst);
      }
    }
  }
  return r;
}

TangentField anchor(const Configuration& u, const GVector& a) { return psi(u, a); }

double anchor_compatibility_defect(const Configuration& u, const GVector& a, const GVector& b) {
  const PolyField fa = PolyField::psi(a.sigma, a.xi);
  const PolyField fb = PolyField::psi(b.sigma, b.xi);
  const Matrix analytic = lie_bracket(fa, fb).evaluate(u);
  const Matrix via_table = psi(u, g_bracket(a, b)).values();
  return (analytic - via_table).cwiseAbs().maxCoeff();
}

SectionField SectionField::constant(const GVector& a) {
  return SectionField([a](const Configuration&) { return a; });
}

GVector SectionField::derivative(const Configuration& u, const TangentField& v, double h) const {
  const Configuration plus = u.retract(u.values() + h * v.values());
  const Configuration minus = u.retract(u.values() - h * v.values());
  return (f_(plus) - f_(minus)) * (0.5 / h);
}

GVector section_bracket(const SectionField& phi, const SectionField& phi2, const Configuration& u, double h) {
  const GVector a = phi(u);
  const GVector b = phi2(u);
  return g_bracket(a, b) + phi.derivative(u, psi(u, b), h) - phi2.derivative(u, psi(u, a), h);
}

GVector almost_bracket(const SectionField& phi, const SectionField& phi2, const Configuration& u, double h) {
  GVector out = section_bracket(phi, phi2, u, h);
  out.xi.setZero();
  return out;
}

SectionField almost_bracket_section(const SectionField& phi, const SectionField& phi2, double h) {
  return SectionField([phi, phi2, h](const Configuration& u) { return almost_bracket(phi, phi2, u, h); });
}

GVector almost_jacobi_defect(const SectionField& a, const SectionField& b, const SectionField& c,
                             const Configuration& u, double h) {
  return almost_bracket(a, almost_bracket_section(b, c, h), u, h) +
         almost_bracket(b, almost_bracket_section(c, a, h), u, h) +
         almost_bracket(c, almost_bracket_section(a, b, h), u, h);
}

}  // namespace charm
