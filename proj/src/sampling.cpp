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

#include "charm/sampling.hpp"

#include <Eigen/QR>

namespace charm {

Vector random_gaussian(int d, Rng& rng) {
  std::normal_distribution<double> n;
  Vector v(d);
  for (int k = 0; k < d; ++k) v(k) = n(rng);
  return v;
}

Vector random_unit(int d, Rng& rng) {
  Vector v = random_gaussian(d, rng);
  while (v.norm() < 1e-3) v = random_gaussian(d, rng);
  return v / v.norm();
}

Configuration random_arm(int d, int segments, Rng& rng) {
  std::uniform_real_distribution<double> len(0.5, 1.5);
  std::vector<double> lengths(segments);
  for (double& l : lengths) l = len(rng);
  Matrix m(d, segments);
  for (int i = 0; i < segments; ++i) m.col(i) = random_unit(d, rng);
  return Configuration::arm(Partition::from_lengths(lengths), m);
}

Configuration random_sampled(int d, int segments, int nodes_per_segment, Rng& rng, QuadratureScheme scheme) {
  std::uniform_real_distribution<double> len(0.5, 1.5);
  std::vector<double> lengths(segments);
  for (double& l : lengths) l = len(rng);
  const Partition p = Partition::from_lengths(lengths);
  // Per segment: a random point plus a random quadratic wiggle, normalized.
  std::vector<Vector> a, b, c;
  for (int i = 0; i < segments; ++i) {
    a.push_back(random_unit(d, rng));
    b.push_back(0.7 * random_gaussian(d, rng));
    c.push_back(0.4 * random_gaussian(d, rng));
  }
  QuadratureRule rule = scheme == QuadratureScheme::kGaussLegendre ? QuadratureRule::gauss_legendre(p, nodes_per_segment)
                                                                  : QuadratureRule::trapezoid(p, nodes_per_segment);
  return Configuration::sampled(rule, [&](int seg, double s) {
    const double x = (s - p.knot(seg)) / p.segment_length(seg);
    Vector v = a[seg] + x * b[seg] + x * x * c[seg];
    return Vector(v / v.norm());
  });
}

GVector random_gvector(int d, Rng& rng) {
  return GVector{random_gaussian(d, rng), random_gaussian(num_pairs(d), rng)};
}

Matrix random_orthogonal(int d, Rng& rng) {
  Matrix g(d, d);
  for (int j = 0; j < d; ++j) g.col(j) = random_gaussian(d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

FlowSchedule random_schedule(int d, int steps, Rng& rng) {
  std::uniform_int_distribution<int> field(0, d - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_real_distribution<double> dur(0.1, 1.0);
  FlowSchedule s;
  for (int k = 0; k < steps; ++k) s.append({field(rng), coin(rng) ? 1 : -1, dur(rng)});
  return s;
}

}  // namespace charm
