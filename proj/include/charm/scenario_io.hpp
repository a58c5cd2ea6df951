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

#ifndef CHARM_SCENARIO_IO_HPP_
#define CHARM_SCENARIO_IO_HPP_

/**
 * @file
 * Scenario files (JSON), reports (JSON with one timestamp header field),
 * trajectory export (JSONL, one record per step) and matrix export (CSV).
 *
 * Canonical form: object keys sorted, numbers printed with %.17g,
 * non-finite numbers as null, two-space indentation.
 */

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "charm/control.hpp"
#include "charm/endpoint_map.hpp"
#include "charm/geometry.hpp"
#include "charm/horizontal_frame.hpp"

namespace charm {

using Json = nlohmann::json;

struct IntegratorSpec {
  Scheme scheme = Scheme::kRk4;
  double dt = 1e-3;
  double feedback_gain = 0.0;
};

struct Scenario {
  int dimension = 2;
  std::vector<double> partition;
  Representation representation = Representation::kArm;
  int samples_per_segment = 0;
  QuadratureScheme quadrature = QuadratureScheme::kTrapezoid;
  /// One vector per segment (arm, or piecewise-constant sampled) or one per
  /// quadrature node (sampled).
  std::vector<Vector> initial;
  /// Only the tolerances present in the file; see tolerance().
  std::map<std::string, double> tolerances;
  std::optional<Json> target;
  std::optional<IntegratorSpec> integrator;
  std::uint64_t seed = 0;

  /// Known keys: tol_unit, tol_singular, tol_rank, tol_reach, tol_solver,
  /// tol_init. tol_singular defaults to 1e-8 L.
  double tolerance(const std::string& key) const;
  double length() const { return partition.empty() ? 0.0 : partition.back(); }
};

/// @throws ValidationError with the offending field path.
Scenario parse_scenario(const Json& j);
Scenario load_scenario(const std::string& path);
Json to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

/// @throws ValidationError naming the segment (1-based) of a non-unit vector.
Configuration initial_configuration(const Scenario& s);

/**
 * `kind:key=value,...` to the structured target object. Vectors are written
 * with ';' between coordinates, polyline points with '|' between waypoints:
 * `circle:r=1.5,period=1`, `segment:to=1;0.5,duration=2`,
 * `polyline:points=1;0|0;1|-1;0,duration=3`.
 */
Json parse_target_spec(const std::string& spec);

/// Builds the curve; `head` fills defaults (segment start, stationary point).
TargetCurve make_target(const Json& target, int dimension, const Vector& head);

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme scheme);

/// Canonical serialization (see file comment). `indent` < 0 gives one line.
std::string canonical_dump(const Json& j, int indent = 2);

Json to_json(const Vector& v);
Json to_json_columns(const Matrix& m);  ///< list of columns
Json to_json_rows(const Matrix& m);     ///< list of rows
Json to_json(const GVector& a);
Json to_json(const GramData& g);
Json to_json(const SingularityReport& r);
Json to_json(const RankReport& r);

/// Report body for `analyze`: gram, singularity, v_subspace, dbar rank.
Json analyze_report(const Scenario& s, const Configuration& u);

/// UTC time in ISO 8601.
std::string utc_timestamp();

/// Writes the report with a "generated_at" header, canonically.
void save_report(const Json& report, const std::string& path,
                 const std::optional<std::string>& timestamp = std::nullopt);

/// {"t", "head", "config", "w", "margin", "tracking_error", "energy"}.
Json trajectory_record(double t, const Vector& head, const Configuration& config, const Vector& w,
                       double margin, double tracking_error, double energy);

std::vector<Json> trajectory_records(const Trajectory& traj);

/// Append-only JSONL writer; the file is truncated when opened.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path);
  void append(const Json& record);

 private:
  std::ofstream out_;
};

void export_trajectory(const Trajectory& traj, const std::string& path);

/// Rows of `m` as comma-separated %.17g values.
void write_csv(const Matrix& m, const std::string& path);

}  // namespace charm

#endif  // CHARM_SCENARIO_IO_HPP_
