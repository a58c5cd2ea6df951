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

#include "charm/suites.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "charm/algebroid.hpp"
#include "charm/poly_field.hpp"
#include "charm/sampling.hpp"

namespace charm {
namespace {

// Symbolic frame fields and nested brackets for one dimension.
struct Ladder {
  explicit Ladder(int d) : d(d) {
    for (int i = 0; i < d; ++i) frame.push_back(PolyField::frame(d, i));
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) b1.push_back(lie_bracket(frame[i], frame[j]));
    }
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) b2.push_back(lie_bracket(frame[i], first(j, k)));
      }
    }
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
          for (int l = 0; l < d; ++l) b3.push_back(lie_bracket(first(i, j), first(k, l)));
        }
      }
    }
  }
  const PolyField& first(int i, int j) const { return b1[i * d + j]; }
  const PolyField& second(int i, int j, int k) const { return b2[(i * d + j) * d + k]; }
  const PolyField& third(int i, int j, int k, int l) const { return b3[((i * d + j) * d + k) * d + l]; }

  int d;
  std::vector<PolyField> frame, b1, b2, b3;
};

const Ladder& ladder(int d) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Ladder>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[d];
  if (!slot) slot = std::make_unique<Ladder>(d);
  return *slot;
}

double sup_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

LadderErrors ladder_errors(const Configuration& u) {
  const int d = u.dimension();
  const Ladder& lad = ladder(d);
  std::vector<Matrix> e(d);
  for (int i = 0; i < d; ++i) e[i] = frame_field(u, i).values();
  auto br = [&](int i, int j) -> Matrix {
    return i == j ? Matrix(Matrix::Zero(d, u.num_samples())) : bracket_field(u, i, j).values();
  };
  auto kd = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  LadderErrors out;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      out.first = std::max(out.first, sup_abs(lad.first(i, j).evaluate(u) - br(i, j)));
      for (int k = 0; k < d; ++k) {
        const Matrix rhs = kd(i, j) * e[k] - kd(i, k) * e[j];
        out.second = std::max(out.second, sup_abs(lad.second(i, j, k).evaluate(u) - rhs));
        for (int l = 0; l < d; ++l) {
          const Matrix rhs3 = kd(i, l) * br(j, k) + kd(j, k) * br(i, l) - kd(i, k) * br(j, l) - kd(j, l) * br(i, k);
          out.third = std::max(out.third, sup_abs(lad.third(i, j, k, l).evaluate(u) - rhs3));
        }
      }
    }
  }
  return out;
}

std::vector<LoopRow> loop_convergence(const std::vector<Configuration>& configs, const std::vector<double>& ts) {
  std::vector<LoopRow> rows;
  for (double t : ts) {
    LoopRow row{t, 0.0};
    for (const Configuration& u : configs) {
      const int d = u.dimension();
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          if (i == j) continue;
          const LoopResult r = commutator_loop(u, i, j, t);
          row.max_error = std::max(row.max_error, sup_norm(r.bracket_estimate - bracket_field(u, i, j)));
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

Json bracket_suite(int d, int trials, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Configuration> configs;
  LadderErrors worst;
  for (int k = 0; k < trials; ++k) {
    configs.push_back(random_arm(d, 2 + k % 5, rng));
    const LadderErrors e = ladder_errors(configs.back());
    worst.first = std::max(worst.first, e.first);
    worst.second = std::max(worst.second, e.second);
    worst.third = std::max(worst.third, e.third);
  }
  const std::vector<LoopRow> rows = loop_convergence(configs, {1e-2, 5e-3, 2.5e-3, 1.25e-3});
  Json table = Json::array();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    Json row = {{"t", rows[k].t}, {"max_error", rows[k].max_error}};
    row["order"] = k == 0 ? Json(nullptr) : Json(std::log2(rows[k - 1].max_error / rows[k].max_error));
    table.push_back(row);
  }
  return {{"command", "brackets"},
          {"dimension", d},
          {"trials", trials},
          {"seed", seed},
          {"loop_sign", kLoopBracketSign},
          {"ladder", {{"first", worst.first}, {"second", worst.second}, {"third", worst.third}}},
          {"loop_convergence", table}};
}

Json algebroid_suite(int d_max, int trials, std::uint64_t seed) {
  Rng rng(seed);
  Json jacobi = Json::array();
  for (int d = 2; d <= d_max; ++d) {
    const JacobiReport r = exhaustive_jacobi(d);
    const StructureConstants& t = structure_constants(d);
    jacobi.push_back({{"dimension", d},
                      {"triples", r.triples},
                      {"nonzero_triples", r.nonzero_triples},
                      {"max_abs_defect", r.max_abs_coefficient},
                      {"antisymmetric", t.is_antisymmetric()},
                      {"unit_coefficients", t.has_unit_coefficients()}});
  }
  double anchor_worst = 0.0;
  double random_jacobi = 0.0;
  for (int k = 0; k < trials; ++k) {
    const int d = 2 + k % std::max(1, d_max - 1);
    const Configuration u = random_arm(d, 2 + k % 4, rng);
    const GVector a = random_gvector(d, rng);
    const GVector b = random_gvector(d, rng);
    const GVector c = random_gvector(d, rng);
    anchor_worst = std::max(anchor_worst, anchor_compatibility_defect(u, a, b));
    const GVector j = jacobi_defect(a, b, c);
    random_jacobi = std::max(random_jacobi, j.stacked().cwiseAbs().maxCoeff());
  }
  Json almost = nullptr;
  if (d_max >= 3) {
    const Configuration u = random_arm(3, 3, rng);
    const GVector defect = almost_jacobi_defect(SectionField::constant(GVector::epsilon(3, 0)),
                                                SectionField::constant(GVector::epsilon(3, 1)),
                                                SectionField::constant(GVector::epsilon(3, 2)), u);
    almost = to_json(defect);
  }
  return {{"command", "algebroid"},
          {"d_max", d_max},
          {"trials", trials},
          {"seed", seed},
          {"jacobi", jacobi},
          {"random_jacobi_max", random_jacobi},
          {"anchor_compatibility_max", anchor_worst},
          {"almost_jacobi_eps123", almost}};
}

}  // namespace charm
