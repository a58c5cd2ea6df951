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
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "charm/errors.hpp"
#include "charm/scenario_io.hpp"
#include "test_support.hpp"

namespace charm {
namespace {

namespace fs = std::filesystem;
using testing::vec;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("charm_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json three_link() {
  const double a = std::acos(0.25);
  return Json{{"dimension", 2},
              {"partition", {0.0, 1.0, 2.0, 3.0}},
              {"representation", {{"kind", "arm"}}},
              {"initial", {{std::cos(a), std::sin(a)}, {1.0, 0.0}, {std::cos(a), -std::sin(a)}}},
              {"tolerances", {{"tol_rank", 1e-9}}},
              {"integrator", {{"scheme", "rk4"}, {"dt", 1e-3}, {"feedback_gain", 0.0}}},
              {"target", {{"kind", "circle"}, {"radius", 1.5}}},
              {"seed", 7}};
}

std::string error_path(const Json& j) {
  try {
    initial_configuration(parse_scenario(j));
  } catch (const ValidationError& e) {
    return e.path();
  }
  return "<no error>";
}

TEST(Scenario, MinimalLoads) {
  const Json j = {{"dimension", 2}, {"partition", {0.0, 1.0}}, {"representation", {{"kind", "arm"}}},
                  {"initial", {{1.0, 0.0}}}};
  const Scenario s = parse_scenario(j);
  const Configuration u = initial_configuration(s);
  EXPECT_EQ(u.dimension(), 2);
  EXPECT_EQ(u.num_samples(), 1);
  EXPECT_DOUBLE_EQ(s.tolerance("tol_unit"), 1e-12);
  EXPECT_DOUBLE_EQ(s.tolerance("tol_singular"), 1e-8);
  EXPECT_DOUBLE_EQ(s.tolerance("tol_reach"), 1e-2);
}

TEST(Scenario, NormErrorNamesSegment) {
  Json j = {{"dimension", 2}, {"partition", {0.0, 1.0}}, {"representation", {{"kind", "arm"}}},
            {"initial", {{0.9, 0.0}}}};
  try {
    initial_configuration(parse_scenario(j));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "initial[0]");
    EXPECT_NE(std::string(e.what()).find("segment 1"), std::string::npos) << e.what();
  }
}

TEST(Scenario, SchemaErrorsCarryFieldPaths) {
  Json j = three_link();
  j["bogus"] = 1;
  EXPECT_EQ(error_path(j), "bogus");
  j = three_link();
  j.erase("dimension");
  EXPECT_EQ(error_path(j), "dimension");
  j = three_link();
  j["partition"] = {0.0, 2.0, 1.0, 3.0};
  EXPECT_EQ(error_path(j), "partition[2]");
  j = three_link();
  j["representation"] = {{"kind", "wiggly"}};
  EXPECT_EQ(error_path(j), "representation.kind");
  j = three_link();
  j["tolerances"] = {{"tol_rank", -1.0}};
  EXPECT_EQ(error_path(j), "tolerances.tol_rank");
  j = three_link();
  j["tolerances"] = {{"tol_fun", 1.0}};
  EXPECT_EQ(error_path(j), "tolerances.tol_fun");
  j = three_link();
  j["integrator"]["scheme"] = "leapfrog";
  EXPECT_EQ(error_path(j), "integrator.scheme");
  j = three_link();
  j["initial"][1] = {1.0, 0.0, 0.0};
  EXPECT_EQ(error_path(j), "initial[1]");
  j = three_link();
  j["initial"].erase(2);
  EXPECT_EQ(error_path(j), "initial");
}

TEST(Scenario, SampledForms) {
  Json j = three_link();
  j["representation"] = {{"kind", "sampled"}, {"samples_per_segment", 3}};
  const Configuration u = initial_configuration(parse_scenario(j));
  EXPECT_EQ(u.representation(), Representation::kSampled);
  EXPECT_EQ(u.num_samples(), 9);

  Json g = three_link();
  g["representation"] = {{"kind", "sampled"}, {"samples_per_segment", 2}, {"quadrature", "gauss-legendre"}};
  Json nodes = Json::array();
  for (int k = 0; k < 6; ++k) nodes.push_back({std::cos(0.1 * k), std::sin(0.1 * k)});
  g["initial"] = nodes;
  const Configuration v = initial_configuration(parse_scenario(g));
  EXPECT_EQ(v.rule().scheme(), QuadratureScheme::kGaussLegendre);
  EXPECT_NEAR(v.sample(5)(0), std::cos(0.5), 1e-15);
}

TEST(Scenario, SaveLoadSaveIsByteIdentical) {
  TempDir dir;
  const Scenario s = parse_scenario(three_link());
  save_scenario(s, dir.file("a.json"));
  const Scenario t = load_scenario(dir.file("a.json"));
  save_scenario(t, dir.file("b.json"));
  EXPECT_EQ(slurp(dir.file("a.json")), slurp(dir.file("b.json")));
  EXPECT_EQ(canonical_dump(to_json(s)), canonical_dump(to_json(t)));
  EXPECT_EQ(t.seed, 7u);
  EXPECT_TRUE(initial_configuration(t).same_point(initial_configuration(s)));
}

TEST(Scenario, LoadReportsMalformedJson) {
  TempDir dir;
  std::ofstream(dir.file("bad.json")) << "{\"dimension\": 2,";
  EXPECT_THROW(load_scenario(dir.file("bad.json")), ValidationError);
  EXPECT_THROW(load_scenario(dir.file("missing.json")), ValidationError);
}

TEST(CanonicalDump, Format) {
  const Json j = {{"b", 0.1}, {"a", {1.0, -0.0, std::nan("")}}, {"c", {{"z", 1}, {"y", true}}}};
  const std::string out = canonical_dump(j);
  EXPECT_LT(out.find("\"a\""), out.find("\"b\""));
  EXPECT_LT(out.find("\"y\""), out.find("\"z\""));
  EXPECT_NE(out.find("0.10000000000000001"), std::string::npos) << out;
  EXPECT_NE(out.find("[1, 0, null]"), std::string::npos) << out;
  EXPECT_EQ(canonical_dump(Json::parse(out)), canonical_dump(Json::parse(canonical_dump(Json::parse(out)))));
}

TEST(TargetSpec, ParsesPresets) {
  const Json c = parse_target_spec("circle:r=1.5,T=2");
  EXPECT_EQ(c["kind"], "circle");
  EXPECT_DOUBLE_EQ(c["radius"].get<double>(), 1.5);
  EXPECT_DOUBLE_EQ(c["period"].get<double>(), 2.0);
  const Json s = parse_target_spec("segment:to=1;0.5,duration=2");
  EXPECT_EQ(s["to"], Json({1.0, 0.5}));
  const Json p = parse_target_spec("polyline:points=1;0|0;1|-1;0,duration=3");
  EXPECT_EQ(p["waypoints"].size(), 3u);
  EXPECT_THROW(parse_target_spec(":r=1"), ValidationError);
  EXPECT_THROW(parse_target_spec("circle:r"), ValidationError);
  EXPECT_THROW(parse_target_spec("circle:r=x"), ValidationError);
}

TEST(TargetSpec, BuildsCurves) {
  const Vector head = vec({1.5, 0.0});
  const TargetCurve c = make_target(parse_target_spec("circle:r=1.5"), 2, head);
  EXPECT_LE((c.position(0.0) - head).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(c.duration(), 1.0);
  const TargetCurve s = make_target(parse_target_spec("segment:to=0;1,duration=2"), 2, head);
  EXPECT_LE((s.position(0.0) - head).norm(), 0.0);
  EXPECT_LE((s.position(2.0) - vec({0.0, 1.0})).norm(), 1e-15);
  EXPECT_THROW(make_target(parse_target_spec("spiral:r=1"), 2, head), ValidationError);
  EXPECT_THROW(make_target(parse_target_spec("circle:r=1,wobble=2"), 2, head), ValidationError);
  EXPECT_THROW(make_target(parse_target_spec("segment:to=0;1;2"), 2, head), ValidationError);
  EXPECT_EQ(parse_scheme("euler"), Scheme::kEuler);
  EXPECT_EQ(scheme_name(Scheme::kRk4), "rk4");
  EXPECT_THROW(parse_scheme("rk2"), ValidationError);
}

TEST(Report, AnalyzeFieldsAndDeterminism) {
  TempDir dir;
  const Scenario s = parse_scenario(three_link());
  const Configuration u = initial_configuration(s);
  const Json r = analyze_report(s, u);
  EXPECT_NEAR(r["margin"].get<double>(), 1.125, 1e-12);
  EXPECT_EQ(r["v_dim"], 2);
  EXPECT_EQ(r["rank"], 3);
  save_report(r, dir.file("r1.json"), "2026-01-01T00:00:00Z");
  save_report(analyze_report(s, u), dir.file("r2.json"), "2026-01-01T00:00:00Z");
  EXPECT_EQ(slurp(dir.file("r1.json")), slurp(dir.file("r2.json")));
  const Json back = Json::parse(slurp(dir.file("r1.json")));
  EXPECT_EQ(back["generated_at"], "2026-01-01T00:00:00Z");
  EXPECT_EQ(utc_timestamp().size(), 20u);
}

TEST(Trajectory, JsonlExportHasMonotoneTimesAndSchema) {
  TempDir dir;
  const Scenario s = parse_scenario(three_link());
  const Configuration u = initial_configuration(s);
  TrackOptions opt;
  opt.dt = 1e-2;
  const Trajectory traj = track(u, make_target(*s.target, 2, endpoint(u)), opt);
  export_trajectory(traj, dir.file("t.jsonl"));
  std::ifstream in(dir.file("t.jsonl"));
  std::string line;
  double last = -1.0;
  int count = 0;
  while (std::getline(in, line)) {
    const Json rec = Json::parse(line);
    for (const char* key : {"t", "head", "config", "w", "margin", "tracking_error", "energy"}) {
      EXPECT_TRUE(rec.contains(key)) << key;
    }
    EXPECT_GT(rec["t"].get<double>(), last);
    last = rec["t"].get<double>();
    EXPECT_EQ(rec["config"].size(), 3u);
    EXPECT_EQ(rec["config"][0].size(), 2u);
    ++count;
  }
  EXPECT_EQ(count, traj.size());

  JsonlWriter w(dir.file("t.jsonl"));
  w.append(Json{{"t", 1.0}});
  EXPECT_EQ(slurp(dir.file("t.jsonl")), "{\"t\":1}\n");
}

TEST(Csv, WritesRows) {
  TempDir dir;
  Matrix m(2, 2);
  m << 1.0, 0.5, -2.0, 0.0;
  write_csv(m, dir.file("m.csv"));
  EXPECT_EQ(slurp(dir.file("m.csv")), "1,0.5\n-2,0\n");
}

}  // namespace
}  // namespace charm
