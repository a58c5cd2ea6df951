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

#include "charm/scenario_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>
#include <sstream>

#include "charm/errors.hpp"

namespace charm {
namespace {

const std::set<std::string> kToleranceKeys = {"tol_unit",  "tol_singular", "tol_rank",
                                              "tol_reach", "tol_solver",   "tol_init"};

const std::map<std::string, double> kToleranceDefaults = {
    {"tol_unit", kDefaultTolUnit}, {"tol_rank", 1e-9},    {"tol_reach", 1e-2},
    {"tol_solver", 1e-10},         {"tol_init", 1e-9}};

std::string index_path(const std::string& base, std::size_t k) { return base + "[" + std::to_string(k) + "]"; }

const Json& require(const Json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(path.empty() ? key : path + "." + key, "required field missing");
  return *it;
}

double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ValidationError(path, "expected a finite number");
  return x;
}

double get_positive(const Json& j, const std::string& path) {
  const double x = get_number(j, path);
  if (!(x > 0.0)) throw ValidationError(path, "must be positive");
  return x;
}

long long get_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ValidationError(path, "expected an integer");
  return j.get<long long>();
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ValidationError(path, "expected a string");
  return j.get<std::string>();
}

Vector get_vector(const Json& j, const std::string& path, int expected_size = -1) {
  if (!j.is_array()) throw ValidationError(path, "expected an array of numbers");
  if (expected_size >= 0 && static_cast<int>(j.size()) != expected_size) {
    throw ValidationError(path, "expected " + std::to_string(expected_size) + " coordinates, got " +
                                    std::to_string(j.size()));
  }
  Vector v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) v(k) = get_number(j[k], index_path(path, k));
  return v;
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ValidationError(path.empty() ? key : path + "." + key, "unknown field");
  }
}

std::string format_double(double x) {
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void dump_into(const Json& j, int indent, int depth, std::string& out) {
  const bool pretty = indent >= 0;
  auto newline = [&](int level) {
    if (!pretty) return;
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent * level), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += pretty ? ": " : ":";
        dump_into(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out.push_back('}');
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out.push_back('[');
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k > 0) out += (flat && pretty) ? ", " : ",";
        if (!flat) newline(depth + 1);
        dump_into(j[k], indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out.push_back(']');
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

Vector default_vector(const Json& target, const std::string& key, const Vector& fallback, int d) {
  auto it = target.find(key);
  if (it == target.end()) return fallback;
  return get_vector(*it, "target." + key, d);
}

double default_number(const Json& target, const std::string& key, double fallback) {
  auto it = target.find(key);
  if (it == target.end()) return fallback;
  return get_number(*it, "target." + key);
}

Vector parse_coordinates(const std::string& text, const std::string& path) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(path, "bad coordinate '" + item + "'");
    }
  }
  Vector v(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) v(k) = values[k];
  return v;
}

}  // namespace

double Scenario::tolerance(const std::string& key) const {
  if (auto it = tolerances.find(key); it != tolerances.end()) return it->second;
  if (key == "tol_singular") return kDefaultTolSingularRel * length();
  if (auto it = kToleranceDefaults.find(key); it != kToleranceDefaults.end()) return it->second;
  throw StructuralError("unknown tolerance " + key);
}

Scheme parse_scheme(const std::string& name) {
  if (name == "rk4") return Scheme::kRk4;
  if (name == "euler") return Scheme::kEuler;
  throw ValidationError("integrator.scheme", "expected \"euler\" or \"rk4\", got \"" + name + "\"");
}

std::string scheme_name(Scheme scheme) { return scheme == Scheme::kRk4 ? "rk4" : "euler"; }

Scenario parse_scenario(const Json& j) {
  if (!j.is_object()) throw ValidationError("", "scenario must be a JSON object");
  reject_unknown(j, {"dimension", "partition", "representation", "initial", "tolerances", "target", "integrator", "seed"},
                 "");
  Scenario s;
  const long long d = get_integer(require(j, "dimension", ""), "dimension");
  if (d < 2) throw ValidationError("dimension", "must be at least 2");
  s.dimension = static_cast<int>(d);

  const Json& part = require(j, "partition", "");
  if (!part.is_array() || part.size() < 2) {
    throw ValidationError("partition", "expected at least two knots");
  }
  for (std::size_t k = 0; k < part.size(); ++k) s.partition.push_back(get_number(part[k], index_path("partition", k)));
  if (s.partition.front() != 0.0) throw ValidationError("partition[0]", "first knot must be 0");
  for (std::size_t k = 1; k < s.partition.size(); ++k) {
    if (!(s.partition[k] > s.partition[k - 1])) {
      throw ValidationError(index_path("partition", k), "knots must be strictly increasing");
    }
  }
  const int segments = static_cast<int>(s.partition.size()) - 1;

  const Json& rep = require(j, "representation", "");
  if (!rep.is_object()) throw ValidationError("representation", "expected an object");
  reject_unknown(rep, {"kind", "samples_per_segment", "quadrature"}, "representation");
  const std::string kind = get_string(require(rep, "kind", "representation"), "representation.kind");
  if (kind == "arm") {
    s.representation = Representation::kArm;
    if (rep.contains("samples_per_segment") || rep.contains("quadrature")) {
      throw ValidationError("representation", "arm takes no sampling fields");
    }
  } else if (kind == "sampled") {
    s.representation = Representation::kSampled;
    const long long m = get_integer(require(rep, "samples_per_segment", "representation"),
                                    "representation.samples_per_segment");
    if (m < 2) throw ValidationError("representation.samples_per_segment", "must be at least 2");
    s.samples_per_segment = static_cast<int>(m);
    if (rep.contains("quadrature")) {
      const std::string q = get_string(rep["quadrature"], "representation.quadrature");
      if (q == "trapezoid") {
        s.quadrature = QuadratureScheme::kTrapezoid;
      } else if (q == "gauss-legendre") {
        s.quadrature = QuadratureScheme::kGaussLegendre;
      } else {
        throw ValidationError("representation.quadrature", "expected \"trapezoid\" or \"gauss-legendre\"");
      }
    }
  } else {
    throw ValidationError("representation.kind", "expected \"arm\" or \"sampled\", got \"" + kind + "\"");
  }

  const Json& init = require(j, "initial", "");
  if (!init.is_array()) throw ValidationError("initial", "expected an array of vectors");
  const std::size_t per_node = static_cast<std::size_t>(segments) * std::max(1, s.samples_per_segment);
  const bool count_ok = init.size() == static_cast<std::size_t>(segments) ||
                        (s.representation == Representation::kSampled && init.size() == per_node);
  if (!count_ok) {
    throw ValidationError("initial", "expected " + std::to_string(segments) + " vectors" +
                                         (s.representation == Representation::kSampled
                                              ? " (or " + std::to_string(per_node) + " node values)"
                                              : std::string()) +
                                         ", got " + std::to_string(init.size()));
  }
  for (std::size_t k = 0; k < init.size(); ++k) s.initial.push_back(get_vector(init[k], index_path("initial", k), s.dimension));

  if (auto it = j.find("tolerances"); it != j.end()) {
    if (!it->is_object()) throw ValidationError("tolerances", "expected an object");
    for (const auto& [key, value] : it->items()) {
      if (!kToleranceKeys.contains(key)) throw ValidationError("tolerances." + key, "unknown tolerance");
      s.tolerances[key] = get_positive(value, "tolerances." + key);
    }
  }

  if (auto it = j.find("target"); it != j.end()) {
    if (!it->is_object()) throw ValidationError("target", "expected an object");
    s.target = *it;
    // Validates the fields eagerly; the head is only needed for defaults.
    make_target(*it, s.dimension, Vector::Zero(s.dimension));
  }

  if (auto it = j.find("integrator"); it != j.end()) {
    if (!it->is_object()) throw ValidationError("integrator", "expected an object");
    reject_unknown(*it, {"scheme", "dt", "feedback_gain"}, "integrator");
    IntegratorSpec spec;
    spec.scheme = parse_scheme(get_string(require(*it, "scheme", "integrator"), "integrator.scheme"));
    spec.dt = get_positive(require(*it, "dt", "integrator"), "integrator.dt");
    if (it->contains("feedback_gain")) spec.feedback_gain = get_number((*it)["feedback_gain"], "integrator.feedback_gain");
    s.integrator = spec;
  }

  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
      throw ValidationError("seed", "expected a nonnegative integer");
    }
    s.seed = it->get<std::uint64_t>();
  }

  initial_configuration(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("", "cannot open scenario file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(j);
}

Json to_json(const Scenario& s) {
  Json j;
  j["dimension"] = s.dimension;
  j["partition"] = s.partition;
  Json rep;
  if (s.representation == Representation::kArm) {
    rep["kind"] = "arm";
  } else {
    rep["kind"] = "sampled";
    rep["samples_per_segment"] = s.samples_per_segment;
    rep["quadrature"] = s.quadrature == QuadratureScheme::kGaussLegendre ? "gauss-legendre" : "trapezoid";
  }
  j["representation"] = rep;
  Json init = Json::array();
  for (const Vector& v : s.initial) init.push_back(to_json(v));
  j["initial"] = init;
  j["tolerances"] = Json::object();
  for (const auto& [key, value] : s.tolerances) j["tolerances"][key] = value;
  if (s.target) j["target"] = *s.target;
  if (s.integrator) {
    j["integrator"] = {{"scheme", scheme_name(s.integrator->scheme)},
                       {"dt", s.integrator->dt},
                       {"feedback_gain", s.integrator->feedback_gain}};
  }
  j["seed"] = s.seed;
  return j;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("", "cannot write " + path);
  out << canonical_dump(to_json(s)) << '\n';
}

Configuration initial_configuration(const Scenario& s) {
  const double tol = s.tolerance("tol_unit");
  for (std::size_t k = 0; k < s.initial.size(); ++k) {
    const double n = s.initial[k].norm();
    if (std::abs(n - 1.0) > tol) {
      const std::string what = s.initial.size() == static_cast<std::size_t>(s.partition.size() - 1)
                                   ? "segment " + std::to_string(k + 1)
                                   : "node " + std::to_string(k + 1);
      throw ValidationError(index_path("initial", k), what + " has norm " + format_double(n) +
                                                          ", tolerance " + format_double(tol));
    }
  }
  const Partition partition(s.partition);
  const int segments = partition.num_segments();
  if (s.representation == Representation::kArm) {
    Matrix m(s.dimension, segments);
    for (int i = 0; i < segments; ++i) m.col(i) = s.initial[i];
    return Configuration::arm(partition, m, tol);
  }
  const int spm = s.samples_per_segment;
  QuadratureRule rule = s.quadrature == QuadratureScheme::kGaussLegendre
                            ? QuadratureRule::gauss_legendre(partition, spm)
                            : QuadratureRule::trapezoid(partition, spm);
  Matrix m(s.dimension, segments * spm);
  const bool per_segment = static_cast<int>(s.initial.size()) == segments;
  for (int k = 0; k < segments * spm; ++k) m.col(k) = per_segment ? s.initial[k / spm] : s.initial[k];
  return Configuration::sampled(rule, m, tol);
}

Json parse_target_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  if (kind.empty()) throw ValidationError("target", "empty target spec");
  Json j;
  j["kind"] = kind;
  if (colon == std::string::npos) return j;
  std::stringstream ss(spec.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("target", "expected key=value, got '" + item + "'");
    std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "r") key = "radius";
    if (key == "T") key = kind == "circle" ? "period" : "duration";
    const std::string path = "target." + key;
    if (key == "points" || key == "waypoints") {
      Json pts = Json::array();
      std::stringstream ps(value);
      std::string point;
      while (std::getline(ps, point, '|')) pts.push_back(to_json(parse_coordinates(point, path)));
      j["waypoints"] = pts;
    } else if (key == "center" || key == "from" || key == "to" || key == "point") {
      j[key] = to_json(parse_coordinates(value, path));
    } else if (key == "plane") {
      const Vector p = parse_coordinates(value, path);
      if (p.size() != 2) throw ValidationError(path, "expected two axis indices");
      j[key] = {static_cast<int>(p(0)), static_cast<int>(p(1))};
    } else {
      const Vector x = parse_coordinates(value, path);
      if (x.size() != 1) throw ValidationError(path, "expected a single number");
      j[key] = x(0);
    }
  }
  return j;
}

TargetCurve make_target(const Json& target, int d, const Vector& head) {
  if (!target.is_object()) throw ValidationError("target", "expected an object");
  const std::string kind = get_string(require(target, "kind", "target"), "target.kind");
  const Vector origin = Vector::Zero(d);
  if (kind == "circle") {
    reject_unknown(target, {"kind", "radius", "center", "period", "phase", "plane"}, "target");
    int a = 0, b = 1;
    if (auto it = target.find("plane"); it != target.end()) {
      if (!it->is_array() || it->size() != 2) throw ValidationError("target.plane", "expected two axis indices");
      a = static_cast<int>(get_integer((*it)[0], "target.plane[0]"));
      b = static_cast<int>(get_integer((*it)[1], "target.plane[1]"));
    }
    return TargetCurve::circle(default_vector(target, "center", origin, d),
                               get_positive(require(target, "radius", "target"), "target.radius"),
                               default_number(target, "period", 1.0), default_number(target, "phase", 0.0), a, b);
  }
  if (kind == "segment") {
    reject_unknown(target, {"kind", "from", "to", "duration"}, "target");
    return TargetCurve::segment(default_vector(target, "from", head, d),
                                get_vector(require(target, "to", "target"), "target.to", d),
                                default_number(target, "duration", 1.0));
  }
  if (kind == "lissajous") {
    reject_unknown(target, {"kind", "center", "ax", "ay", "fx", "fy", "duration", "phase"}, "target");
    return TargetCurve::lissajous(default_vector(target, "center", origin, d), default_number(target, "ax", 1.0),
                                  default_number(target, "ay", 1.0), default_number(target, "fx", 1.0),
                                  default_number(target, "fy", 2.0), default_number(target, "duration", 1.0),
                                  default_number(target, "phase", 0.0));
  }
  if (kind == "polyline") {
    reject_unknown(target, {"kind", "waypoints", "duration"}, "target");
    const Json& pts = require(target, "waypoints", "target");
    if (!pts.is_array()) throw ValidationError("target.waypoints", "expected an array of points");
    std::vector<Vector> waypoints;
    for (std::size_t k = 0; k < pts.size(); ++k) waypoints.push_back(get_vector(pts[k], index_path("target.waypoints", k), d));
    return TargetCurve::polyline(std::move(waypoints), default_number(target, "duration", 1.0));
  }
  if (kind == "stationary") {
    reject_unknown(target, {"kind", "point", "duration"}, "target");
    return TargetCurve::stationary(default_vector(target, "point", head, d), default_number(target, "duration", 1.0));
  }
  throw ValidationError("target.kind", "unknown target kind \"" + kind + "\"");
}

std::string canonical_dump(const Json& j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  return out;
}

Json to_json(const Vector& v) {
  Json j = Json::array();
  for (int k = 0; k < v.size(); ++k) j.push_back(v(k));
  return j;
}

Json to_json_columns(const Matrix& m) {
  Json j = Json::array();
  for (int k = 0; k < m.cols(); ++k) j.push_back(to_json(Vector(m.col(k))));
  return j;
}

Json to_json_rows(const Matrix& m) {
  Json j = Json::array();
  for (int k = 0; k < m.rows(); ++k) j.push_back(to_json(Vector(m.row(k).transpose())));
  return j;
}

Json to_json(const GVector& a) { return {{"sigma", to_json(a.sigma)}, {"xi", to_json(a.xi)}}; }

Json to_json(const GramData& g) {
  return {{"gamma", to_json_rows(g.gamma)},
          {"a_op", to_json_rows(g.a_op)},
          {"eigenvalues", to_json(g.eigenvalues)},
          {"eigenvectors", to_json_columns(g.eigenvectors)},
          {"length", g.length},
          {"margin", g.margin}};
}

Json to_json(const SingularityReport& r) {
  return {{"is_singular", r.is_singular},
          {"margin", r.margin},
          {"axis", r.axis ? to_json(*r.axis) : Json(nullptr)},
          {"collinearity_residual", r.collinearity_residual}};
}

Json to_json(const RankReport& r) {
  Json kernel = Json::array();
  for (const GVector& a : r.kernel_basis) kernel.push_back(to_json(a));
  return {{"model", r.model == TangentModel::kArm ? "arm" : "sampled"},
          {"v_dim", r.v_dim},
          {"rank", r.rank},
          {"predicted_rank", r.predicted_rank},
          {"singular", r.singular},
          {"singular_values", to_json(r.singular_values)},
          {"kernel_basis", kernel}};
}

Json analyze_report(const Scenario& s, const Configuration& u) {
  const double tol_singular = s.tolerance("tol_singular");
  const double tol_rank = s.tolerance("tol_rank");
  const GramData g = gram(u);
  const SingularityReport sing = singularity(u, g, tol_singular);
  const Matrix v = v_subspace(u, tol_rank);
  const TangentModel model = u.representation() == Representation::kArm ? TangentModel::kArm : TangentModel::kSampled;
  const RankReport rank = dbar_rank(u, model, tol_rank, tol_singular);
  Json j;
  j["command"] = "analyze";
  j["dimension"] = u.dimension();
  j["length"] = u.length();
  j["num_segments"] = u.partition().num_segments();
  j["head"] = to_json(endpoint(u));
  j["knot_points"] = to_json_columns(knot_points(u));
  j["gram"] = to_json(g);
  j["singularity"] = to_json(sing);
  j["tol_singular"] = tol_singular;
  j["v_subspace"] = {{"v_dim", static_cast<int>(v.cols())}, {"basis", to_json_columns(v)}};
  j["dbar"] = to_json(rank);
  j["margin"] = g.margin;
  j["v_dim"] = static_cast<int>(v.cols());
  j["rank"] = rank.rank;
  j["seed"] = s.seed;
  return j;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void save_report(const Json& report, const std::string& path, const std::optional<std::string>& timestamp) {
  Json j = report;
  j["generated_at"] = timestamp.value_or(utc_timestamp());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("", "cannot write " + path);
  out << canonical_dump(j) << '\n';
}

Json trajectory_record(double t, const Vector& head, const Configuration& config, const Vector& w,
                       double margin, double tracking_error, double energy) {
  return {{"t", t},
          {"head", to_json(head)},
          {"config", to_json_columns(config.values())},
          {"w", to_json(w)},
          {"margin", margin},
          {"tracking_error", tracking_error},
          {"energy", energy}};
}

std::vector<Json> trajectory_records(const Trajectory& traj) {
  std::vector<Json> out;
  out.reserve(traj.size());
  for (int k = 0; k < traj.size(); ++k) {
    out.push_back(trajectory_record(traj.times[k], traj.heads[k], traj.configurations[k], traj.controls[k],
                                    traj.margin[k], traj.tracking_error[k], traj.energy[k]));
  }
  return out;
}

JsonlWriter::JsonlWriter(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw ValidationError("", "cannot write " + path);
}

void JsonlWriter::append(const Json& record) {
  out_ << canonical_dump(record, -1) << '\n';
  out_.flush();
}

void export_trajectory(const Trajectory& traj, const std::string& path) {
  JsonlWriter writer(path);
  for (const Json& r : trajectory_records(traj)) writer.append(r);
}

void write_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("", "cannot write " + path);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace charm
