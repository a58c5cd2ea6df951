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

#ifndef CHARM_CONTROL_HPP_
#define CHARM_CONTROL_HPP_

/**
 * @file
 * Horizontal lifts of head trajectories, flows of the frame fields,
 * commutator loops, energy accounting and reachability probes.
 */

#include <optional>
#include <string>
#include <vector>

#include "charm/geometry.hpp"
#include "charm/horizontal_frame.hpp"

namespace charm {

/// Default safety margin, as a fraction of L, kept between targets and the
/// boundary sphere of radius L.
inline constexpr double kDefaultBoundaryFraction = 0.02;

/**
 * Head target c(t) on [0, T]. Presets have analytic derivatives, polylines
 * use the slope of the active piece (right-continuous at waypoints).
 */
class TargetCurve {
 public:
  enum class Kind { kCircle, kSegment, kLissajous, kPolyline, kStationary };

  /// center + r (cos(2 pi t / T + phase) e_a + sin(2 pi t / T + phase) e_b).
  static TargetCurve circle(const Vector& center, double radius, double period, double phase = 0.0,
                            int axis_a = 0, int axis_b = 1);
  static TargetCurve segment(const Vector& from, const Vector& to, double duration);
  /// center + (ax sin(2 pi fx t / T + phase), ay sin(2 pi fy t / T)) in the plane (e_0, e_1).
  static TargetCurve lissajous(const Vector& center, double ax, double ay, double fx, double fy,
                               double duration, double phase = 0.0);
  /// Waypoints reached at equally spaced times over [0, T].
  static TargetCurve polyline(std::vector<Vector> waypoints, double duration);
  static TargetCurve stationary(const Vector& point, double duration);

  Kind kind() const { return kind_; }
  int dimension() const { return static_cast<int>(center_.size()); }
  double duration() const { return duration_; }
  Vector position(double t) const;
  Vector velocity(double t) const;

  /// @throws ValidationError unless ||c(t)|| < L - margin on a grid of `samples` times.
  void check_inside(double length, double margin, int samples = 1001) const;

 private:
  TargetCurve() = default;

  Kind kind_ = Kind::kStationary;
  Vector center_;
  Vector to_;
  double radius_ = 0.0;
  double ax_ = 0.0;
  double ay_ = 0.0;
  double fx_ = 1.0;
  double fy_ = 1.0;
  double phase_ = 0.0;
  int axis_a_ = 0;
  int axis_b_ = 1;
  double duration_ = 1.0;
  std::vector<Vector> waypoints_;
};

struct LiftOptions {
  std::optional<double> tol_singular;  ///< defaults to 1e-8 L
  double regularization = 0.0;         ///< lambda added to A_u when positive
};

struct Lift {
  TangentField velocity;
  Vector w;
  double condition_number = 1.0;
  double residual = 0.0;  ///< ||A_u w - head_vel||
  bool restricted = false;
};

/**
 * The horizontal field with pushforward `head_vel`: v = grad w with
 * A_u w = head_vel. At a singular u the solve is restricted to the range of
 * A_u.
 * @throws UncontrollableDirectionError when u is singular and head_vel has a
 * component along the axis.
 */
Lift lift_velocity(const Configuration& u, const Vector& head_vel, const LiftOptions& options = {});

enum class Scheme { kEuler, kRk4 };

struct TrackOptions {
  Scheme scheme = Scheme::kRk4;
  double dt = 1e-3;
  double feedback_gain = 0.0;
  double tol_init = 1e-9;
  std::optional<double> tol_singular;
  double regularization = 0.0;
  /// Integration horizon; the curve duration when unset.
  std::optional<double> horizon;
  /// Boundary margin for the target check, as a fraction of L.
  double boundary_fraction = kDefaultBoundaryFraction;
};

enum class TrackStatus { kCompleted, kSingularityStop };

std::string to_string(TrackStatus status);

struct Trajectory {
  std::vector<double> times;
  std::vector<Configuration> configurations;
  std::vector<Vector> heads;
  std::vector<Vector> controls;      ///< w(t)
  std::vector<Matrix> velocities;    ///< u-dot(t), same layout as the configuration
  std::vector<double> tracking_error;
  std::vector<double> margin;
  std::vector<double> condition_number;
  std::vector<double> energy;        ///< cumulative
  TrackStatus status = TrackStatus::kCompleted;
  std::optional<Vector> axis;        ///< set on a singularity stop

  int size() const { return static_cast<int>(times.size()); }
  double max_tracking_error() const;
  double final_energy() const { return energy.empty() ? 0.0 : energy.back(); }
};

/**
 * Integrates u-dot = lift(c-dot(t) + K (c(t) - E(u))) with renormalization
 * after every step (and at every stage for rk4).
 * @throws ValidationError if ||E(u0) - c(0)|| > tol_init or the target leaves
 * the safety ball. A singular start or a singular crossing returns the
 * partial trajectory with status kSingularityStop.
 */
Trajectory track(const Configuration& u0, const TargetCurve& c, const TrackOptions& options = {});

/// Trapezoid rule in time of (1/2) ||v(t)||_{L2}^2.
double kinematic_energy(const std::vector<double>& times, const std::vector<TangentField>& velocities);

/// Energy of the stored velocities of a trajectory.
double energy(const Trajectory& traj);

/// Flow for time t of the field s -> g - <g, u(s)> u(s), in closed form.
Configuration flow_along(const Configuration& u, const Vector& g, double t);

/// Flow of the frame field E_i.
Configuration flow_frame(const Configuration& u, int i, double t);

struct FlowStep {
  int field = 0;
  int sign = 1;
  double duration = 0.0;
};

class FlowSchedule {
 public:
  FlowSchedule() = default;
  explicit FlowSchedule(std::vector<FlowStep> steps);

  void append(FlowStep step);
  FlowSchedule then(const FlowSchedule& other) const;

  const std::vector<FlowStep>& steps() const { return steps_; }
  double total_time() const;

 private:
  std::vector<FlowStep> steps_;
};

Configuration composite_flow(const Configuration& u, const FlowSchedule& schedule);

/// The loop Phi^X_t o Phi^Y_t o Phi^X_-t o Phi^Y_-t (u) returns to
/// u + kLoopBracketSign t^2 [X, Y](u) + O(t^3).
inline constexpr double kLoopBracketSign = 1.0;

struct LoopResult {
  Configuration configuration;
  TangentField bracket_estimate;
};

/// Loop for the frame fields X = E_i, Y = E_j. The estimate is
/// kLoopBracketSign log_u(loop(u)) / t^2.
LoopResult commutator_loop(const Configuration& u, int i, int j, double t);

/// Loop for X = E_gx and Y = E_gy with ambient directions gx, gy.
LoopResult commutator_loop(const Configuration& u, const Vector& gx, const Vector& gy, double t);

/// Pointwise log map: the tangent field at u whose geodesics reach v at time 1.
TangentField log_map(const Configuration& u, const Configuration& v);

struct ControlCoordinates {
  GVector a;
  double residual = 0.0;  ///< L2 norm of psi(u, a) - velocity
};

/// Minimal-norm a with psi(u, a) closest to `velocity` in L2.
ControlCoordinates control_coordinates(const TangentField& velocity, double tol_rank = 1e-10);

std::vector<ControlCoordinates> control_coordinates(const Trajectory& traj, double tol_rank = 1e-10);

struct ReachOptions {
  int budget = 10000;
  double tol_reach = 1e-2;
  double tol_rank = 1e-10;
  int max_backtracks = 30;
};

enum class ReachStatus { kSuccess, kBudgetExhausted, kStalled };

std::string to_string(ReachStatus status);

struct ReachResult {
  std::vector<double> trace;  ///< best sup distance after each iteration, nonincreasing
  ReachStatus status = ReachStatus::kBudgetExhausted;
  int iterations = 0;
  double best_distance = 0.0;
  Configuration best;
};

/**
 * Greedy descent of d_inf(current, v). Every iteration solves for the
 * minimal-norm psi coefficients of the pointwise log map toward v and
 * realizes them by a frame-field flow plus one commutator loop per pair,
 * backtracking on the step length; when that fails it tries a horizontal
 * lift of the straight head path toward E(v). One iteration costs one unit
 * of budget. The iteration is deterministic, so an iteration without
 * progress ends the probe with kStalled.
 * @throws StructuralError if u and v do not share a layout.
 */
ReachResult reach_probe(const Configuration& u, const Configuration& v, const ReachOptions& options = {});

}  // namespace charm

#endif  // CHARM_CONTROL_HPP_
