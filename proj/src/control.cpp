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

#include "charm/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "charm/endpoint_map.hpp"
#include "charm/errors.hpp"

namespace charm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive(double value, const std::string& path) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(path, "must be a positive finite number");
  }
}

void require_dimension(const Vector& v, const std::string& path) {
  if (v.size() < 2) throw ValidationError(path, "dimension must be at least 2");
  if (!v.allFinite()) throw ValidationError(path, "non-finite coordinate");
}

Matrix normalize_columns(const Matrix& x) {
  Matrix out = x;
  for (int k = 0; k < out.cols(); ++k) {
    const double n = out.col(k).norm();
    if (n < 0.5) throw DegenerateConfigurationError("integrator stage collapsed a sample");
    out.col(k) /= n;
  }
  return out;
}

}  // namespace

TargetCurve TargetCurve::circle(const Vector& center, double radius, double period, double phase,
                                int axis_a, int axis_b) {
  require_dimension(center, "target.center");
  require_positive(radius, "target.radius");
  require_positive(period, "target.period");
  const int d = static_cast<int>(center.size());
  if (axis_a < 0 || axis_a >= d || axis_b < 0 || axis_b >= d || axis_a == axis_b) {
    throw ValidationError("target.plane", "circle plane axes must be distinct coordinates");
  }
  TargetCurve c;
  c.kind_ = Kind::kCircle;
  c.center_ = center;
  c.radius_ = radius;
  c.duration_ = period;
  c.phase_ = phase;
  c.axis_a_ = axis_a;
  c.axis_b_ = axis_b;
  return c;
}

TargetCurve TargetCurve::segment(const Vector& from, const Vector& to, double duration) {
  require_dimension(from, "target.from");
  if (to.size() != from.size()) throw ValidationError("target.to", "dimension mismatch");
  require_positive(duration, "target.duration");
  TargetCurve c;
  c.kind_ = Kind::kSegment;
  c.center_ = from;
  c.to_ = to;
  c.duration_ = duration;
  return c;
}

TargetCurve TargetCurve::lissajous(const Vector& center, double ax, double ay, double fx, double fy,
                                   double duration, double phase) {
  require_dimension(center, "target.center");
  require_positive(duration, "target.duration");
  TargetCurve c;
  c.kind_ = Kind::kLissajous;
  c.center_ = center;
  c.ax_ = ax;
  c.ay_ = ay;
  c.fx_ = fx;
  c.fy_ = fy;
  c.duration_ = duration;
  c.phase_ = phase;
  return c;
}

TargetCurve TargetCurve::polyline(std::vector<Vector> waypoints, double duration) {
  if (waypoints.size() < 2) throw ValidationError("target.waypoints", "need at least two waypoints");
  require_dimension(waypoints.front(), "target.waypoints[0]");
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    if (waypoints[k].size() != waypoints.front().size()) {
      throw ValidationError("target.waypoints[" + std::to_string(k) + "]", "dimension mismatch");
    }
  }
  require_positive(duration, "target.duration");
  TargetCurve c;
  c.kind_ = Kind::kPolyline;
  c.center_ = waypoints.front();
  c.waypoints_ = std::move(waypoints);
  c.duration_ = duration;
  return c;
}

TargetCurve TargetCurve::stationary(const Vector& point, double duration) {
  require_dimension(point, "target.point");
  require_positive(duration, "target.duration");
  TargetCurve c;
  c.kind_ = Kind::kStationary;
  c.center_ = point;
  c.duration_ = duration;
  return c;
}

Vector TargetCurve::position(double t) const {
  switch (kind_) {
    case Kind::kCircle: {
      const double theta = kTwoPi * t / duration_ + phase_;
      Vector p = center_;
      p(axis_a_) += radius_ * std::cos(theta);
      p(axis_b_) += radius_ * std::sin(theta);
      return p;
    }
    case Kind::kSegment:
      return center_ + (to_ - center_) * (t / duration_);
    case Kind::kLissajous: {
      Vector p = center_;
      p(0) += ax_ * std::sin(kTwoPi * fx_ * t / duration_ + phase_);
      p(1) += ay_ * std::sin(kTwoPi * fy_ * t / duration_);
      return p;
    }
    case Kind::kPolyline: {
      const int pieces = static_cast<int>(waypoints_.size()) - 1;
      const double span = duration_ / pieces;
      const int k = std::clamp(static_cast<int>(std::floor(t / span)), 0, pieces - 1);
      const double theta = (t - k * span) / span;
      return (1.0 - theta) * waypoints_[k] + theta * waypoints_[k + 1];
    }
    case Kind::kStationary:
      return center_;
  }
  return center_;
}

Vector TargetCurve::velocity(double t) const {
  const int d = dimension();
  switch (kind_) {
    case Kind::kCircle: {
      const double omega = kTwoPi / duration_;
      const double theta = omega * t + phase_;
      Vector v = Vector::Zero(d);
      v(axis_a_) = -radius_ * omega * std::sin(theta);
      v(axis_b_) = radius_ * omega * std::cos(theta);
      return v;
    }
    case Kind::kSegment:
      return (to_ - center_) / duration_;
    case Kind::kLissajous: {
      Vector v = Vector::Zero(d);
      v(0) = ax_ * kTwoPi * fx_ / duration_ * std::cos(kTwoPi * fx_ * t / duration_ + phase_);
      v(1) = ay_ * kTwoPi * fy_ / duration_ * std::cos(kTwoPi * fy_ * t / duration_);
      return v;
    }
    case Kind::kPolyline: {
      const int pieces = static_cast<int>(waypoints_.size()) - 1;
      const double span = duration_ / pieces;
      const int k = std::clamp(static_cast<int>(std::floor(t / span)), 0, pieces - 1);
      return (waypoints_[k + 1] - waypoints_[k]) / span;
    }
    case Kind::kStationary:
      return Vector::Zero(d);
  }
  return Vector::Zero(d);
}

void TargetCurve::check_inside(double length, double margin, int samples) const {
  const double limit = length - margin;
  for (int k = 0; k < samples; ++k) {
    const double t = duration_ * k / std::max(1, samples - 1);
    const double r = position(t).norm();
    if (!(r < limit)) {
      throw ValidationError("target", "curve reaches radius " + std::to_string(r) + " at t = " +
                                          std::to_string(t) + ", limit is " + std::to_string(limit));
    }
  }
}

Lift lift_velocity(const Configuration& u, const Vector& head_vel, const LiftOptions& options) {
  if (head_vel.size() != u.dimension()) throw StructuralError("lift_velocity: dimension mismatch");
  const GramData g = gram(u);
  Lift out{TangentField::zero(u), Vector::Zero(u.dimension())};
  if (options.regularization > 0.0) {
    const Matrix a = g.a_op + options.regularization * Matrix::Identity(u.dimension(), u.dimension());
    Eigen::LDLT<Matrix> ldlt(a);
    out.w = ldlt.solve(head_vel);
    out.condition_number = 1.0 / ldlt.rcond();
  } else {
    const GramSolve s = solve_gram(u, g, head_vel, options.tol_singular.value_or(default_tol_singular(u)));
    out.w = s.w;
    out.condition_number = s.condition_number;
    out.restricted = s.restricted;
  }
  out.residual = (g.a_op * out.w - head_vel).norm();
  out.velocity = horizontal_gradient(u, out.w);
  return out;
}

std::string to_string(TrackStatus status) {
  return status == TrackStatus::kCompleted ? "completed" : "singularity-stop";
}

double Trajectory::max_tracking_error() const {
  double m = 0.0;
  for (double e : tracking_error) m = std::max(m, e);
  return m;
}

Trajectory track(const Configuration& u0, const TargetCurve& c, const TrackOptions& options) {
  if (c.dimension() != u0.dimension()) throw ValidationError("target", "dimension does not match the configuration");
  require_positive(options.dt, "integrator.dt");
  const double length = u0.length();
  c.check_inside(length, options.boundary_fraction * length);
  const double mismatch = (endpoint(u0) - c.position(0.0)).norm();
  if (mismatch > options.tol_init) {
    throw ValidationError("initial", "head " + std::to_string(mismatch) + " away from the target start");
  }
  const double tol_singular = options.tol_singular.value_or(default_tol_singular(u0));
  const LiftOptions lift_opts{tol_singular, options.regularization};
  const double k_gain = options.feedback_gain;

  auto command = [&](double t, const Vector& head) {
    Vector cmd = c.velocity(t);
    if (k_gain != 0.0) cmd += k_gain * (c.position(t) - head);
    return cmd;
  };
  // Ambient extension x -> lift at normalize(x).
  auto field = [&](double t, const Matrix& x) -> Matrix {
    const Configuration v = u0.retract(x);
    return lift_velocity(v, command(t, endpoint(v)), lift_opts).velocity.values();
  };

  const double horizon = options.horizon.value_or(c.duration());
  const int steps = std::max(1, static_cast<int>(std::ceil(horizon / options.dt - 1e-9)));
  const double h = horizon / steps;

  Trajectory traj;
  auto record = [&](double t, const Configuration& u) -> bool {
    const GramData g = gram(u);
    const Vector head = endpoint(u);
    traj.times.push_back(t);
    traj.configurations.push_back(u);
    traj.heads.push_back(head);
    traj.tracking_error.push_back((head - c.position(t)).norm());
    traj.margin.push_back(g.margin);
    bool ok = g.margin > tol_singular || options.regularization > 0.0;
    if (ok) {
      const Lift lift = lift_velocity(u, command(t, head), lift_opts);
      traj.controls.push_back(lift.w);
      traj.velocities.push_back(lift.velocity.values());
      traj.condition_number.push_back(lift.condition_number);
    } else {
      traj.controls.push_back(Vector::Zero(u.dimension()));
      traj.velocities.push_back(Matrix::Zero(u.dimension(), u.num_samples()));
      traj.condition_number.push_back(std::numeric_limits<double>::infinity());
      traj.status = TrackStatus::kSingularityStop;
      traj.axis = g.eigenvectors.col(0);
    }
    const std::size_t n = traj.times.size();
    if (n == 1) {
      traj.energy.push_back(0.0);
    } else {
      const double dt = traj.times[n - 1] - traj.times[n - 2];
      const auto& w = u.rule().weights();
      const double e0 = 0.5 * traj.velocities[n - 2].colwise().squaredNorm().dot(w.transpose());
      const double e1 = 0.5 * traj.velocities[n - 1].colwise().squaredNorm().dot(w.transpose());
      traj.energy.push_back(traj.energy.back() + 0.5 * dt * (e0 + e1));
    }
    return ok;
  };

  Configuration u = u0;
  if (!record(0.0, u)) return traj;
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    Matrix next;
    try {
      const Matrix& x = u.values();
      if (options.scheme == Scheme::kEuler) {
        next = x + h * traj.velocities.back();
      } else {
        const Matrix k1 = traj.velocities.back();
        const Matrix k2 = field(t + 0.5 * h, x + 0.5 * h * k1);
        const Matrix k3 = field(t + 0.5 * h, x + 0.5 * h * k2);
        const Matrix k4 = field(t + h, x + h * k3);
        next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    } catch (const NoSolutionError& e) {
      traj.status = TrackStatus::kSingularityStop;
      traj.axis = e.axis();
      return traj;
    }
    u = u.retract(normalize_columns(next));
    if (!record((k + 1 == steps) ? horizon : (k + 1) * h, u)) return traj;
  }
  return traj;
}

double kinematic_energy(const std::vector<double>& times, const std::vector<TangentField>& velocities) {
  if (times.size() != velocities.size()) throw StructuralError("kinematic_energy: size mismatch");
  double acc = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double a = l2_norm(velocities[k - 1]);
    const double b = l2_norm(velocities[k]);
    acc += 0.5 * (times[k] - times[k - 1]) * 0.5 * (a * a + b * b);
  }
  return acc;
}

double energy(const Trajectory& traj) {
  std::vector<TangentField> v;
  v.reserve(traj.velocities.size());
  for (int k = 0; k < traj.size(); ++k) v.push_back(TangentField::unchecked(traj.configurations[k], traj.velocities[k]));
  return kinematic_energy(traj.times, v);
}

}  // namespace charm
