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
#include <numbers>

#include <gtest/gtest.h>

#include "charm/errors.hpp"
#include "charm/geometry.hpp"
#include "charm/horizontal_frame.hpp"
#include "charm/sampling.hpp"
#include "test_support.hpp"

namespace charm {
namespace {

using testing::arm;
using testing::unit;
using testing::vec;

TEST(Partition, RejectsBadKnots) {
  EXPECT_THROW(Partition({0.0}), ValidationError);
  EXPECT_THROW(Partition({0.0, 1.0, 1.0}), ValidationError);
  EXPECT_THROW(Partition({0.5, 1.0}), ValidationError);
  const Partition p = Partition::uniform(4, 2.0);
  EXPECT_EQ(p.num_segments(), 4);
  EXPECT_DOUBLE_EQ(p.length(), 2.0);
  EXPECT_DOUBLE_EQ(p.segment_length(2), 0.5);
}

TEST(Quadrature, WeightsSumToSegmentLengths) {
  const Partition p = Partition::from_lengths(std::vector<double>{0.3, 1.2, 0.5});
  for (const auto& rule : {QuadratureRule::trapezoid(p, 5), QuadratureRule::gauss_legendre(p, 4),
                           QuadratureRule::segment_exact(p)}) {
    for (int i = 0; i < p.num_segments(); ++i) {
      double acc = 0.0;
      for (int k = 0; k < rule.nodes_per_segment(); ++k) {
        const double w = rule.weight(rule.first_node(i) + k);
        EXPECT_GT(w, 0.0);
        acc += w;
      }
      EXPECT_NEAR(acc, p.segment_length(i), 1e-14);
    }
  }
}

TEST(Quadrature, GaussIsExactForPolynomials) {
  // 4 Gauss points integrate degree 7 exactly: int_0^2 s^7 ds = 32.
  const QuadratureRule rule = QuadratureRule::gauss_legendre(Partition::uniform(1, 2.0), 4);
  double acc = 0.0;
  for (int k = 0; k < rule.num_nodes(); ++k) acc += rule.weight(k) * std::pow(rule.node(k), 7);
  EXPECT_NEAR(acc, 32.0, 1e-12);
}

TEST(Quadrature, NodesNotSharedAcrossKnots) {
  const QuadratureRule rule = QuadratureRule::trapezoid(Partition::uniform(2, 2.0), 3);
  ASSERT_EQ(rule.num_nodes(), 6);
  EXPECT_DOUBLE_EQ(rule.node(2), 1.0);
  EXPECT_DOUBLE_EQ(rule.node(3), 1.0);
  EXPECT_EQ(rule.segment_of(2), 0);
  EXPECT_EQ(rule.segment_of(3), 1);
}

TEST(Configuration, RejectsNonUnitVectors) {
  try {
    arm({1.0, 1.0}, {unit(2, 0), vec({0.9, 0.0})});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("segment 2"), std::string::npos) << e.what();
  }
}

TEST(Configuration, RejectsLayoutMismatch) {
  EXPECT_THROW(Configuration::arm(Partition::uniform(2, 2.0), Matrix::Identity(2, 3)), StructuralError);
}

TEST(IntegrateField, ArmTwoSegments) {
  const Configuration u = arm({1.0, 1.0}, {unit(2, 0), unit(2, 1)});
  EXPECT_TRUE(integrate_field(u).isApprox(vec({1.0, 1.0})));
  EXPECT_EQ(integrate_field(TangentField::zero(u)), Vector::Zero(2));
}

TEST(IntegrateField, SampledHalfCircle) {
  const QuadratureRule rule = QuadratureRule::trapezoid(Partition::uniform(1, std::numbers::pi), 1001);
  const Configuration u =
      Configuration::sampled(rule, [](int, double s) { return vec({std::cos(s), std::sin(s)}); });
  const Vector e = integrate_field(u);
  EXPECT_NEAR(e(0), 0.0, 1e-5);
  EXPECT_NEAR(e(1), 2.0, 1e-5);
}

TEST(IntegrateField, LayoutMismatchIsStructural) {
  const QuadratureRule rule = QuadratureRule::trapezoid(Partition::uniform(1, 1.0), 3);
  EXPECT_THROW(integrate_field(Matrix::Zero(2, 4), rule), StructuralError);
}

TEST(IntegrateField, ArmIsExactSum) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Configuration u = random_arm(2 + trial % 4, 1 + trial % 6, rng);
    Vector expected = Vector::Zero(u.dimension());
    for (int i = 0; i < u.partition().num_segments(); ++i) expected += u.partition().segment_length(i) * u.sample(i);
    EXPECT_LE((integrate_field(u) - expected).norm(), 1e-14);
  }
}

TEST(Norms, ConstantFieldExample) {
  const Configuration u = arm({2.0}, {unit(3, 0)});
  const TangentField v = TangentField::make(u, unit(3, 1));
  EXPECT_DOUBLE_EQ(sup_norm(v), 1.0);
  EXPECT_NEAR(l2_norm(v), std::sqrt(2.0), 1e-15);
}

TEST(Norms, InequalitiesOnRandomFields) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Configuration u = trial % 2 ? random_arm(3, 4, rng) : random_sampled(3, 2, 5, rng);
    const TangentField v = TangentField::project(u, Matrix::Random(3, u.num_samples()));
    const TangentField w = TangentField::project(u, Matrix::Random(3, u.num_samples()));
    EXPECT_GE(l2_inner(v, v), 0.0);
    EXPECT_LE(l2_norm(v), std::sqrt(u.length()) * sup_norm(v) + 1e-12);
    EXPECT_LE(std::abs(l2_inner(v, w)), l2_norm(v) * l2_norm(w) + 1e-12);
  }
  const Configuration u = random_arm(3, 3, rng);
  EXPECT_EQ(l2_inner(TangentField::zero(u), TangentField::zero(u)), 0.0);
}

TEST(TangentField, ProjectsSmallNormalComponentAndRejectsLarge) {
  const Configuration u = arm({1.0}, {unit(2, 0)});
  const TangentField v = TangentField::make(u, vec({1e-12, 1.0}));
  EXPECT_EQ(v.sample(0)(0), 0.0);
  EXPECT_THROW(TangentField::make(u, vec({1e-3, 1.0})), ValidationError);
}

TEST(TangentField, L2InnerLayoutMismatch) {
  const Configuration u = arm({1.0}, {unit(2, 0)});
  const Configuration v = arm({1.0, 1.0}, {unit(2, 0), unit(2, 0)});
  EXPECT_THROW(l2_inner(TangentField::zero(u), TangentField::zero(v)), StructuralError);
}

TEST(Renormalize, Cases) {
  const Configuration u = arm({1.0, 1.0}, {unit(2, 0), unit(2, 1)});
  EXPECT_TRUE(renormalize(u).same_point(u));
  const Configuration r = u.retract(testing::columns({vec({2.0, 0.0}), vec({0.0, 3.0})}));
  EXPECT_EQ(r.sample(0), unit(2, 0));
  EXPECT_TRUE(renormalize(r).same_point(r));
  EXPECT_THROW(u.retract(testing::columns({vec({1e-9, 0.0}), vec({0.0, 1.0})})), DegenerateConfigurationError);
}

TEST(Renormalize, UnitInvariant) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Configuration u = random_arm(4, 3, rng);
    const Configuration r = u.retract(u.values() * 1.7 + 0.01 * Matrix::Random(4, 3));
    EXPECT_LE(unit_defect(r.values()), kDefaultTolUnit);
  }
}

TEST(ArmToSampled, ExampleAndFrameAgreement) {
  const Configuration u = arm({1.0, 1.0}, {unit(2, 0), unit(2, 1)});
  const Configuration s = arm_to_sampled(u, 4);
  EXPECT_EQ(s.num_samples(), 8);
  EXPECT_EQ(s.representation(), Representation::kSampled);
  EXPECT_LE((integrate_field(s) - integrate_field(u)).norm(), 1e-15);
  for (int i = 0; i < 2; ++i) {
    const Matrix arm_frame = frame_field(u, i).values();
    const Matrix sampled_frame = frame_field(s, i).values();
    for (int k = 0; k < s.num_samples(); ++k) {
      EXPECT_EQ((sampled_frame.col(k) - arm_frame.col(k / 4)).cwiseAbs().maxCoeff(), 0.0);
    }
  }
  EXPECT_THROW(arm_to_sampled(u, 1), ValidationError);
}

TEST(ArmToSampled, GaussRoundTripIntegral) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Configuration u = random_arm(3, 5, rng);
    const Configuration s = arm_to_sampled(u, 3, QuadratureScheme::kGaussLegendre);
    EXPECT_LE((integrate_field(s) - integrate_field(u)).norm(), 1e-13);
  }
}

TEST(SupDistance, Basic) {
  const Configuration u = arm({1.0, 1.0}, {unit(2, 0), unit(2, 1)});
  const Configuration v = arm({1.0, 1.0}, {unit(2, 0), unit(2, 0)});
  EXPECT_NEAR(sup_distance(u, v), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(sup_distance(u, u), 0.0);
}

}  // namespace
}  // namespace charm
