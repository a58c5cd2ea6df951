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

// Command-line front end.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure
// (singularity stop, probe did not reach the target), 64 usage error.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "charm/algebroid.hpp"
#include "charm/control.hpp"
#include "charm/errors.hpp"
#include "charm/sampling.hpp"
#include "charm/scenario_io.hpp"
#include "charm/service.hpp"
#include "charm/suites.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitUsage = 64;

using charm::Json;

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CHARM_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only "off" itself should do that.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

void emit(const Json& report, const std::string& out) {
  if (out.empty()) {
    std::cout << charm::canonical_dump(report) << "\n";
  } else {
    charm::save_report(report, out);
    spdlog::info("wrote {}", out);
  }
}

struct AnalyzeArgs {
  std::string scenario, out, csv;
};

int run_analyze(const AnalyzeArgs& a) {
  const charm::Scenario s = charm::load_scenario(a.scenario);
  const charm::Configuration u = charm::initial_configuration(s);
  const Json report = charm::analyze_report(s, u);
  emit(report, a.out);
  if (!a.csv.empty()) {
    const charm::GramData g = charm::gram(u);
    charm::write_csv(g.gamma, a.csv + "gamma.csv");
    charm::write_csv(g.a_op, a.csv + "a_op.csv");
    const auto model = u.representation() == charm::Representation::kArm ? charm::TangentModel::kArm
                                                                           : charm::TangentModel::kSampled;
    const charm::RankReport r = charm::dbar_rank(u, model, s.tolerance("tol_rank"), s.tolerance("tol_singular"));
    charm::write_csv(r.singular_values, a.csv + "singular_values.csv");
  }
  return kExitOk;
}

struct TrackArgs {
  std::string scenario, target, scheme, out, report;
  double dt = 0.0;
  double k = 0.0;
  bool k_set = false;
  double horizon = 0.0;
};

int run_track(const TrackArgs& a) {
  const charm::Scenario s = charm::load_scenario(a.scenario);
  const charm::Configuration u0 = charm::initial_configuration(s);
  Json target_spec;
  if (!a.target.empty()) {
    target_spec = charm::parse_target_spec(a.target);
  } else if (s.target) {
    target_spec = *s.target;
  } else {
    throw charm::ValidationError("target", "no target given (use --target or the scenario's \"target\")");
  }
  const charm::TargetCurve curve = charm::make_target(target_spec, s.dimension, charm::endpoint(u0));
  charm::TrackOptions opts;
  if (s.integrator) {
    opts.scheme = s.integrator->scheme;
    opts.dt = s.integrator->dt;
    opts.feedback_gain = s.integrator->feedback_gain;
  }
  if (!a.scheme.empty()) opts.scheme = charm::parse_scheme(a.scheme);
  if (a.dt > 0.0) opts.dt = a.dt;
  if (a.k_set) opts.feedback_gain = a.k;
  if (a.horizon > 0.0) opts.horizon = a.horizon;
  opts.tol_init = s.tolerance("tol_init");
  opts.tol_singular = s.tolerance("tol_singular");

  const charm::Trajectory traj = charm::track(u0, curve, opts);
  if (!a.out.empty()) charm::export_trajectory(traj, a.out);
  Json summary = {{"command", "track"},
                  {"status", charm::to_string(traj.status)},
                  {"steps", traj.size()},
                  {"scheme", charm::scheme_name(opts.scheme)},
                  {"dt", opts.dt},
                  {"feedback_gain", opts.feedback_gain},
                  {"target", target_spec},
                  {"max_tracking_error", traj.max_tracking_error()},
                  {"final_tracking_error", traj.tracking_error.back()},
                  {"final_energy", traj.final_energy()},
                  {"final_time", traj.times.back()},
                  {"axis", traj.axis ? charm::to_json(*traj.axis) : Json(nullptr)}};
  emit(summary, a.report);
  if (traj.status == charm::TrackStatus::kSingularityStop) {
    spdlog::error("singularity stop at t = {}", traj.times.back());
    return kExitNumerical;
  }
  return kExitOk;
}

struct BracketArgs {
  int d = 3;
  int trials = 20;
  std::uint64_t seed = 1;
  std::string out;
};

int run_brackets(const BracketArgs& a) {
  if (a.d < 2) throw charm::ValidationError("--d", "must be at least 2");
  const Json report = charm::bracket_suite(a.d, a.trials, a.seed);
  std::fprintf(stderr, "%-10s %-12s %s\n", "t", "max_error", "order");
  for (const Json& row : report["loop_convergence"]) {
    std::fprintf(stderr, "%-10.4g %-12.4e %s\n", row["t"].get<double>(), row["max_error"].get<double>(),
                 row["order"].is_null() ? "-" : std::to_string(row["order"].get<double>()).c_str());
  }
  emit(report, a.out);
  return kExitOk;
}

struct OrbitArgs {
  std::string scenario, goal, out;
  int schedule_steps = 5;
  int budget = 10000;
  double tol = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int run_orbit(const OrbitArgs& a) {
  const charm::Scenario s = charm::load_scenario(a.scenario);
  const charm::Configuration u = charm::initial_configuration(s);
  Json goal_info;
  charm::Configuration v = u;
  if (!a.goal.empty()) {
    v = charm::initial_configuration(charm::load_scenario(a.goal));
    goal_info = {{"kind", "scenario"}, {"path", a.goal}};
  } else {
    charm::Rng rng(a.seed_set ? a.seed : s.seed);
    const charm::FlowSchedule sched = charm::random_schedule(s.dimension, a.schedule_steps, rng);
    v = charm::composite_flow(u, sched);
    Json steps = Json::array();
    for (const auto& st : sched.steps()) steps.push_back({{"field", st.field}, {"sign", st.sign}, {"duration", st.duration}});
    goal_info = {{"kind", "random_schedule"}, {"schedule", steps}};
  }
  charm::ReachOptions opts;
  opts.budget = a.budget;
  opts.tol_reach = a.tol > 0.0 ? a.tol : s.tolerance("tol_reach");
  const charm::ReachResult r = charm::reach_probe(u, v, opts);
  const Json report = {{"command", "orbit"},
                       {"goal", goal_info},
                       {"status", charm::to_string(r.status)},
                       {"iterations", r.iterations},
                       {"best_distance", r.best_distance},
                       {"tol_reach", opts.tol_reach},
                       {"budget", opts.budget},
                       {"trace", r.trace}};
  emit(report, a.out);
  return r.status == charm::ReachStatus::kSuccess ? kExitOk : kExitNumerical;
}

struct AlgebroidArgs {
  int d_max = 5;
  int trials = 100;
  std::uint64_t seed = 1;
  std::string out;
};

int run_algebroid(const AlgebroidArgs& a) {
  if (a.d_max < 2) throw charm::ValidationError("--d-max", "must be at least 2");
  const Json report = charm::algebroid_suite(a.d_max, a.trials, a.seed);
  emit(report, a.out);
  for (const Json& row : report["jacobi"]) {
    if (row["nonzero_triples"].get<long long>() != 0) return kExitNumerical;
  }
  return kExitOk;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string scenario;
  double tick_hz = 60.0;
  double k = 5.0;
  double v_max = 2.0;
};

charm::HttpService* g_service = nullptr;

void handle_signal(int) {
  if (g_service) g_service->stop();
}

int run_serve(const ServeArgs& a) {
  charm::SessionParams params;
  params.tick_hz = a.tick_hz;
  params.gain = a.k;
  params.v_max = a.v_max;
  params = charm::parse_session_params(Json::object(), params);
  charm::SessionManager manager;
  if (!a.scenario.empty()) {
    const std::string id = manager.create(charm::load_scenario(a.scenario), params);
    std::cout << "session " << id << "\n" << std::flush;
  }
  charm::HttpService service(manager, params);
  g_service = &service;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::cout << "listening on " << a.host << ":" << a.port << "\n" << std::flush;
  const bool ok = service.run(a.host, a.port);
  g_service = nullptr;
  return ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Horizontal lifts, singularity and bracket analysis for articulated arms and sampled snakes"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "Gram matrix, singularity, V_u and bracket rank of a scenario");
  c_analyze->add_option("--scenario", analyze.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  c_analyze->add_option("--out", analyze.out, "report JSON (stdout if omitted)");
  c_analyze->add_option("--csv", analyze.csv, "prefix for gamma.csv, a_op.csv, singular_values.csv");

  TrackArgs track;
  auto* c_track = app.add_subcommand("track", "Horizontal lift of a head target curve");
  c_track->add_option("--scenario", track.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  c_track->add_option("--target", track.target, "target spec, e.g. circle:r=1.5,period=1");
  c_track->add_option("--dt", track.dt, "time step")->check(CLI::PositiveNumber);
  c_track->add_option("--scheme", track.scheme, "euler or rk4")->check(CLI::IsMember({"euler", "rk4"}));
  c_track->add_option("--k", track.k, "feedback gain")->each([&](const std::string&) { track.k_set = true; });
  c_track->add_option("--horizon", track.horizon, "integration time (default: target duration)")
      ->check(CLI::PositiveNumber);
  c_track->add_option("--out", track.out, "trajectory JSONL");
  c_track->add_option("--report", track.report, "summary JSON (stdout if omitted)");

  BracketArgs brackets;
  auto* c_brackets = app.add_subcommand("brackets", "Bracket identities and commutator-loop convergence");
  c_brackets->add_option("--d", brackets.d, "ambient dimension")->check(CLI::Range(2, 8));
  c_brackets->add_option("--trials", brackets.trials, "random configurations")->check(CLI::Range(1, 100000));
  c_brackets->add_option("--seed", brackets.seed, "random seed");
  c_brackets->add_option("--out", brackets.out, "report JSON (stdout if omitted)");

  OrbitArgs orbit;
  auto* c_orbit = app.add_subcommand("orbit", "Reachability probe toward a goal configuration");
  c_orbit->add_option("--scenario", orbit.scenario, "start scenario JSON")->required()->check(CLI::ExistingFile);
  c_orbit->add_option("--goal", orbit.goal, "goal scenario JSON (default: random flow schedule)")
      ->check(CLI::ExistingFile);
  c_orbit->add_option("--schedule-steps", orbit.schedule_steps, "steps of the random goal schedule")
      ->check(CLI::Range(1, 1000));
  c_orbit->add_option("--budget", orbit.budget, "iteration budget")->check(CLI::Range(1, 100000000));
  c_orbit->add_option("--tol", orbit.tol, "success distance (default: tol_reach)")->check(CLI::PositiveNumber);
  c_orbit->add_option("--seed", orbit.seed, "seed for the goal schedule (default: scenario seed)")
      ->each([&](const std::string&) { orbit.seed_set = true; });
  c_orbit->add_option("--out", orbit.out, "report JSON (stdout if omitted)");

  AlgebroidArgs algebroid;
  auto* c_algebroid = app.add_subcommand("algebroid", "Structure-constant Jacobi and anchor suites");
  c_algebroid->add_option("--d-max", algebroid.d_max, "largest dimension for the exhaustive check")
      ->check(CLI::Range(2, 8));
  c_algebroid->add_option("--trials", algebroid.trials, "random anchor checks")->check(CLI::Range(1, 100000));
  c_algebroid->add_option("--seed", algebroid.seed, "random seed");
  c_algebroid->add_option("--out", algebroid.out, "report JSON (stdout if omitted)");

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Start the session service");
  c_serve->add_option("--host", serve.host, "bind address");
  c_serve->add_option("--port", serve.port, "port")->check(CLI::Range(1, 65535));
  c_serve->add_option("--scenario", serve.scenario, "create one session at startup")->check(CLI::ExistingFile);
  c_serve->add_option("--tick-hz", serve.tick_hz, "tick rate")->check(CLI::PositiveNumber);
  c_serve->add_option("--k", serve.k, "pursuit gain K_s")->check(CLI::NonNegativeNumber);
  c_serve->add_option("--v-max", serve.v_max, "head speed limit")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (c_analyze->parsed()) return run_analyze(analyze);
    if (c_track->parsed()) return run_track(track);
    if (c_brackets->parsed()) return run_brackets(brackets);
    if (c_orbit->parsed()) return run_orbit(orbit);
    if (c_algebroid->parsed()) return run_algebroid(algebroid);
    if (c_serve->parsed()) return run_serve(serve);
  } catch (const charm::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const charm::NoSolutionError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const charm::DegenerateConfigurationError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const charm::StructuralError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
