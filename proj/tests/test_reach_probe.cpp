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

#include <cmath>

#include <gtest/gtest.h>

#include "charm/control.hpp"
#include "charm/endpoint_map.hpp"
#include "charm/errors.hpp"
#include "charm/sampling.hpp"
#include "test_support.hpp"

namespace charm {
namespace {

using testing::arm;
using testing::unit;
using testing::vec;

void expect_consistent(const ReachResult& r, const Configuration& v, const ReachOptions& opt) {
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_LE(r.trace[k], r.trace[k - 1]);
  EXPECT_LE(r.iterations, opt.budget);
  EXPECT_EQ(static_cast<int>(r.trace.size()), r.iterations + 1);
  EXPECT_DOUBLE_EQ(r.best_distance, r.trace.back());
  EXPECT_NEAR(sup_distance(r.best, v), r.best_distance, 1e-15);
  EXPECT_LE(unit_defect(r.best.values()), 1e-12);
  EXPECT_EQ(r.status == ReachStatus::kSuccess, r.best_distance <= opt.tol_reach);
}

TEST(ReachProbe, IdenticalTargetSucceedsImmediately) {
  Rng rng(1);
  const Configuration u = random_arm(3, 3, rng);
  const ReachResult r = reach_probe(u, u);
  EXPECT_EQ(r.status, ReachStatus::kSuccess);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.best_distance, 0.0);
}

TEST(ReachProbe, RecoversRandomCompositeFlowTargets) {
  Rng rng(2);
  const ReachOptions opt;
  for (int trial = 0; trial < 20; ++trial) {
    const Configuration u = random_arm(2, 2, rng);
    const Configuration v = composite_flow(u, random_schedule(2, 5, rng));
    const ReachResult r = reach_probe(u, v, opt);
    expect_consistent(r, v, opt);
    EXPECT_EQ(r.status, ReachStatus::kSuccess) << "trial " << trial << " distance " << r.best_distance;
  }
}

TEST(ReachProbe, HigherDimensionalAndSampled) {
  Rng rng(3);
  ReachOptions opt;
  opt.tol_reach = 1e-3;
  for (int trial = 0; trial < 6; ++trial) {
    const Configuration u = trial % 2 ? random_arm(3, 3, rng) : random_sampled(3, 2, 3, rng);
    const Configuration v = composite_flow(u, random_schedule(3, 4, rng));
    const ReachResult r = reach_probe(u, v, opt);
    expect_consistent(r, v, opt);
    EXPECT_EQ(r.status, ReachStatus::kSuccess) << "trial " << trial << " distance " << r.best_distance;
  }
}

TEST(ReachProbe, SingularToSingularWithinLeaf) {
  const Vector x = unit(2, 0);
  const Vector y = vec({std::cos(1.0), std::sin(1.0)});
  const Configuration u = arm({1.0, 1.0}, {x, x});
  const Configuration v = arm({1.0, 1.0}, {y, y});
  const ReachOptions opt;
  const ReachResult r = reach_probe(u, v, opt);
  expect_consistent(r, v, opt);
  EXPECT_EQ(r.status, ReachStatus::kSuccess);

  const Vector z = vec({0.0, 0.6, 0.8});
  const Configuration a = arm({1.0, 0.5, 1.5}, {unit(3, 0), -unit(3, 0), unit(3, 0)});
  const Configuration b = arm({1.0, 0.5, 1.5}, {z, -z, z});
  const ReachResult s = reach_probe(a, b, opt);
  expect_consistent(s, b, opt);
  EXPECT_EQ(s.status, ReachStatus::kSuccess);
}

TEST(ReachProbe, BudgetIsRespected) {
  Rng rng(4);
  const Configuration u = random_arm(3, 4, rng);
  const Configuration v = composite_flow(u, random_schedule(3, 8, rng));
  ReachOptions opt;
  opt.budget = 1;
  opt.tol_reach = 1e-14;
  const ReachResult r = reach_probe(u, v, opt);
  expect_consistent(r, v, opt);
  EXPECT_NE(r.status, ReachStatus::kSuccess);
  opt.budget = 0;
  const ReachResult none = reach_probe(u, v, opt);
  EXPECT_EQ(none.iterations, 0);
  EXPECT_EQ(none.status, ReachStatus::kBudgetExhausted);
}

TEST(ReachProbe, LayoutMismatch) {
  Rng rng(5);
  EXPECT_THROW(reach_probe(random_arm(2, 2, rng), random_arm(2, 3, rng)), StructuralError);
}

}  // namespace
}  // namespace charm
