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

#include <Eigen/SVD>

#include "charm/control.hpp"
#include "charm/endpoint_map.hpp"
#include "charm/errors.hpp"

namespace charm {
namespace {

// Frame flow along sigma for unit time, then one loop per pair with
// t^2 = |xi_ij| and Y = sign(xi_ij) E_j.
Configuration realize(const Configuration& u, const GVector& a) {
  const int d = u.dimension();
  Configuration x = flow_along(u, a.sigma, 1.0);
  for (int p = 0; p < a.xi.size(); ++p) {
    const double xi = a.xi(p);
    if (xi == 0.0) continue;
    const auto [i, j] = pair_at(p, d);
    const Vector gy = (xi > 0 ? 1.0 : -1.0) * Vector::Unit(d, j);
    x = commutator_loop(x, Vector::Unit(d, i), gy, std::sqrt(std::abs(xi))).configuration;
  }
  return x;
}

}  // namespace

ControlCoordinates control_coordinates(const TangentField& velocity, double tol_rank) {
  const Configuration& u = velocity.base();
  const int d = u.dimension();
  const Matrix columns = psi_columns(u);
  const Vector rhs = stack_weighted(velocity);
  Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Vector coeffs = Vector::Zero(columns.cols());
  const double cutoff = s.size() > 0 ? tol_rank * s(0) : 0.0;
  for (int k = 0; k < s.size(); ++k) {
    if (s(k) <= cutoff || s(k) == 0.0) break;
    coeffs += (svd.matrixU().col(k).dot(rhs) / s(k)) * svd.matrixV().col(k);
  }
  ControlCoordinates out{GVector::from_stacked(d, coeffs)};
  out.residual = (columns * coeffs - rhs).norm();
  return out;
}

std::vector<ControlCoordinates> control_coordinates(const Trajectory& traj, double tol_rank) {
  std::vector<ControlCoordinates> out;
  out.reserve(traj.size());
  for (int k = 0; k < traj.size(); ++k) {
    out.push_back(control_coordinates(TangentField::unchecked(traj.configurations[k], traj.velocities[k]), tol_rank));
  }
  return out;
}

std::string to_string(ReachStatus status) {
  switch (status) {
    case ReachStatus::kSuccess:
      return "success";
    case ReachStatus::kBudgetExhausted:
      return "budget-exhausted";
    case ReachStatus::kStalled:
      return "stalled";
  }
  return "unknown";
}

ReachResult reach_probe(const Configuration& u, const Configuration& v, const ReachOptions& options) {
  if (!u.same_layout(v)) throw StructuralError("reach_probe: configurations do not share a layout");
  ReachResult r{{}, ReachStatus::kBudgetExhausted, 0, sup_distance(u, v), u};
  r.trace.push_back(r.best_distance);
  if (r.best_distance <= options.tol_reach) {
    r.status = ReachStatus::kSuccess;
    return r;
  }
  Configuration current = u;
  double alpha = 1.0;
  while (r.iterations < options.budget) {
    ++r.iterations;
    bool improved = false;
    const GVector a = control_coordinates(log_map(current, v), options.tol_rank).a;
    double step = std::min(1.0, 2.0 * alpha);
    for (int b = 0; b <= options.max_backtracks && !improved; ++b, step *= 0.5) {
      const Configuration candidate = realize(current, a * step);
      const double dist = sup_distance(candidate, v);
      if (dist < r.best_distance) {
        current = candidate;
        r.best_distance = dist;
        alpha = step;
        improved = true;
      }
    }
    if (!improved) {
      // Horizontal move: flow of the lift of the straight head path.
      try {
        const Lift lift = lift_velocity(current, endpoint(v) - endpoint(current));
        double tau = 1.0;
        for (int b = 0; b <= options.max_backtracks && !improved; ++b, tau *= 0.5) {
          const Configuration candidate = flow_along(current, lift.w, tau);
          const double dist = sup_distance(candidate, v);
          if (dist < r.best_distance) {
            current = candidate;
            r.best_distance = dist;
            improved = true;
          }
        }
      } catch (const NoSolutionError&) {
      }
    }
    r.trace.push_back(r.best_distance);
    if (r.best_distance <= options.tol_reach) {
      r.status = ReachStatus::kSuccess;
      break;
    }
    if (!improved) {
      r.status = ReachStatus::kStalled;
      break;
    }
  }
  r.best = current;
  return r;
}

}  // namespace charm
