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

#include <algorithm>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "charm/control.hpp"
#include "charm/errors.hpp"

namespace charm {
namespace {

// Flow of x' = g - <g, x> x for unit g and time tau >= 0. Along g the
// coordinate follows tanh(tau + artanh(c0)); the orthogonal part shrinks by
// 1 / (cosh tau + c0 sinh tau). Written with e^{-2 tau} to stay finite.
Vector unit_flow(const Vector& x, const Vector& g, double tau) {
  const double c0 = std::clamp(g.dot(x), -1.0, 1.0);
  const Vector w0 = x - c0 * g;
  const double w2 = w0.squaredNorm();
  double p = 1.0 + c0;
  double m = 1.0 - c0;
  if (c0 < -0.5) p = w2 / m;
  if (c0 > 0.5) m = w2 / p;
  if (p == 0.0) return x;
  const double e = std::exp(-2.0 * tau);
  const double denom = p + m * e;
  const double c = (p - m * e) / denom;
  const double scale = 2.0 * std::exp(-tau) / denom;
  Vector out = c * g + scale * w0;
  return out / out.norm();
}

Vector some_perpendicular(const Vector& x) {
  Eigen::Index k = 0;
  x.cwiseAbs().minCoeff(&k);
  Vector e = Vector::Zero(x.size());
  e(k) = 1.0;
  Vector p = e - x.dot(e) * x;
  return p / p.norm();
}

}  // namespace

Configuration flow_along(const Configuration& u, const Vector& g, double t) {
  if (g.size() != u.dimension()) throw StructuralError("flow_along: dimension mismatch");
  const double gn = g.norm();
  if (gn == 0.0 || t == 0.0) return u;
  Vector dir = g / gn;
  double tau = gn * t;
  if (tau < 0.0) {
    dir = -dir;
    tau = -tau;
  }
  Matrix values(u.dimension(), u.num_samples());
  for (int k = 0; k < u.num_samples(); ++k) values.col(k) = unit_flow(u.sample(k), dir, tau);
  return u.retract(values);
}

Configuration flow_frame(const Configuration& u, int i, double t) {
  if (i < 0 || i >= u.dimension()) throw StructuralError("flow_frame: index out of range");
  return flow_along(u, Vector::Unit(u.dimension(), i), t);
}

FlowSchedule::FlowSchedule(std::vector<FlowStep> steps) {
  for (const FlowStep& s : steps) append(s);
}

void FlowSchedule::append(FlowStep step) {
  if (!(step.duration >= 0.0) || !std::isfinite(step.duration)) {
    throw ValidationError("schedule.duration", "durations must be finite and nonnegative");
  }
  if (step.sign != 1 && step.sign != -1) throw ValidationError("schedule.sign", "sign must be +1 or -1");
  steps_.push_back(step);
}

FlowSchedule FlowSchedule::then(const FlowSchedule& other) const {
  FlowSchedule out = *this;
  for (const FlowStep& s : other.steps_) out.steps_.push_back(s);
  return out;
}

double FlowSchedule::total_time() const {
  double acc = 0.0;
  for (const FlowStep& s : steps_) acc += s.duration;
  return acc;
}

Configuration composite_flow(const Configuration& u, const FlowSchedule& schedule) {
  Configuration x = u;
  for (const FlowStep& s : schedule.steps()) x = flow_frame(x, s.field, s.sign * s.duration);
  return x;
}

TangentField log_map(const Configuration& u, const Configuration& v) {
  if (!u.same_layout(v)) throw StructuralError("log_map: layout mismatch");
  Matrix out(u.dimension(), u.num_samples());
  for (int k = 0; k < u.num_samples(); ++k) {
    const Vector x = u.sample(k);
    const Vector y = v.sample(k);
    const double c = x.dot(y);
    const Vector w = y - c * x;
    const double s = w.norm();
    if (s < 1e-300) {
      out.col(k) = c > 0.0 ? Vector::Zero(x.size()) : Vector(std::numbers::pi * some_perpendicular(x));
    } else {
      out.col(k) = (std::atan2(s, c) / s) * w;
    }
  }
  return TangentField::project(u, out);
}

LoopResult commutator_loop(const Configuration& u, const Vector& gx, const Vector& gy, double t) {
  Configuration x = flow_along(u, gy, -t);
  x = flow_along(x, gx, -t);
  x = flow_along(x, gy, t);
  x = flow_along(x, gx, t);
  TangentField estimate = t == 0.0 ? TangentField::zero(u) : log_map(u, x) * (kLoopBracketSign / (t * t));
  return {x, estimate};
}

LoopResult commutator_loop(const Configuration& u, int i, int j, double t) {
  const int d = u.dimension();
  if (i < 0 || i >= d || j < 0 || j >= d) throw StructuralError("commutator_loop: index out of range");
  return commutator_loop(u, Vector::Unit(d, i), Vector::Unit(d, j), t);
}

}  // namespace charm
