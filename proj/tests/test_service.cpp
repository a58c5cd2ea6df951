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

#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "charm/endpoint_map.hpp"
#include "charm/errors.hpp"
#include "charm/scenario_io.hpp"
#include "charm/service.hpp"
#include "httplib.h"
#include "test_support.hpp"

namespace charm {
namespace {

Json three_link_json() {
  const double a = std::acos(0.25);
  return Json{{"dimension", 2},
              {"partition", {0.0, 1.0, 2.0, 3.0}},
              {"representation", {{"kind", "arm"}}},
              {"initial", {{std::cos(a), std::sin(a)}, {1.0, 0.0}, {std::cos(a), -std::sin(a)}}}};
}

Json folded_json() {
  return Json{{"dimension", 2},
              {"partition", {0.0, 1.0, 2.0, 3.0}},
              {"representation", {{"kind", "arm"}}},
              {"initial", {{1.0, 0.0}, {-1.0, 0.0}, {1.0, 0.0}}}};
}

Scenario three_link() { return parse_scenario(three_link_json()); }

Vector json_vector(const Json& j) {
  Vector v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) v(k) = j[k].get<double>();
  return v;
}

// Independent check of a serialized snapshot against its own segments.
void expect_valid_snapshot(const Json& s, const Scenario& sc) {
  ASSERT_EQ(s["type"], "state");
  const Json& segs = s["segments"];
  ASSERT_EQ(static_cast<int>(segs.size()), static_cast<int>(sc.partition.size()) - 1);
  Vector head = Vector::Zero(sc.dimension);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Vector x = json_vector(segs[i]);
    EXPECT_NEAR(x.norm(), 1.0, 1e-12);
    head += (sc.partition[i + 1] - sc.partition[i]) * x;
  }
  EXPECT_LE((head - json_vector(s["head"])).norm(), 1e-9);
  for (const char* key : {"t", "energy", "margin", "status", "clamped", "tracking_error", "target", "knot_points"}) {
    EXPECT_TRUE(s.contains(key)) << key;
  }
}

TEST(SessionParams, ParsesAndValidates) {
  const SessionParams p = parse_session_params({{"k", 3.0}, {"v_max", 1.0}, {"tick_hz", 30.0}});
  EXPECT_DOUBLE_EQ(p.gain, 3.0);
  EXPECT_DOUBLE_EQ(p.v_max, 1.0);
  EXPECT_DOUBLE_EQ(p.tick_hz, 30.0);
  EXPECT_THROW(parse_session_params({{"v_max", -1.0}}), ValidationError);
  EXPECT_THROW(parse_session_params({{"gravity", 1.0}}), ValidationError);
  EXPECT_DOUBLE_EQ(parse_session_params(Json()).gain, 5.0);
}

TEST(Session, StationaryTargetKeepsHeadAndEnergy) {
  const Scenario sc = three_link();
  Session s("x", sc);
  const Vector head0 = s.snapshot().head;
  for (int k = 0; k < 30; ++k) s.tick();
  EXPECT_LE((s.snapshot().head - head0).norm(), 1e-12);
  EXPECT_EQ(s.snapshot().energy, 0.0);
  EXPECT_EQ(s.status(), SessionStatus::kRunning);
  expect_valid_snapshot(to_json(s.snapshot()), sc);
}

TEST(Session, ConvergesToReachableTarget) {
  const Scenario sc = three_link();
  Session s("x", sc);
  const Json ack = s.handle({{"type", "set_target"}, {"pos", {0.3, 1.6}}});
  EXPECT_EQ(ack["type"], "ack");
  EXPECT_EQ(ack["clamped"], false);
  int ticks = 0;
  double last_energy = 0.0;
  while (ticks < 600 && (s.snapshot().head - testing::vec({0.3, 1.6})).norm() > sc.tolerance("tol_reach")) {
    const Snapshot& snap = s.tick();
    EXPECT_GE(snap.energy, last_energy);
    last_energy = snap.energy;
    expect_valid_snapshot(to_json(snap), sc);
    ++ticks;
  }
  EXPECT_LT(ticks, 600);
  EXPECT_EQ(s.status(), SessionStatus::kRunning);
  EXPECT_EQ(static_cast<int>(s.log().size()), ticks + 1);
  // Speed limit: the head moves at most v_max per second.
  EXPECT_GE(ticks / s.params().tick_hz, (testing::vec({0.3, 1.6}) - testing::vec({1.5, 0.0})).norm() / 2.0 - 1e-9);
}

TEST(Session, ClampsTargetsOutsideTheSafetyBall) {
  Session s("x", three_link());
  const Json ack = s.handle({{"type", "set_target"}, {"pos", {10.0, 0.0}}});
  EXPECT_EQ(ack["clamped"], true);
  EXPECT_NEAR(json_vector(ack["target"]).norm(), 3.0 * 0.98, 1e-12);
  EXPECT_TRUE(to_json(s.tick())["clamped"].get<bool>());
}

TEST(Session, SingularStopAndResume) {
  const Scenario sc = parse_scenario(folded_json());
  Session s("x", sc);
  s.handle({{"type", "set_target"}, {"pos", {3.0, 0.0}}});
  const Snapshot& stopped = s.tick();
  EXPECT_EQ(stopped.status, SessionStatus::kSingularStopped);
  ASSERT_TRUE(stopped.axis.has_value());
  EXPECT_NEAR(std::abs(stopped.axis->dot(testing::unit(2, 0))), 1.0, 1e-12);
  const Json j = to_json(stopped);
  EXPECT_EQ(j["status"], "singular-stopped");
  EXPECT_TRUE(j.contains("axis"));
  EXPECT_LE((stopped.head - testing::vec({1.0, 0.0})).norm(), 1e-15);

  // A target straight off the axis resumes through the restricted solve.
  s.handle({{"type", "set_target"}, {"pos", {1.0, 0.5}}});
  const Snapshot& moving = s.tick();
  EXPECT_EQ(moving.status, SessionStatus::kRunning);
  EXPECT_FALSE(to_json(moving).contains("axis"));
  EXPECT_GT(moving.head(1), 0.0);
  expect_valid_snapshot(to_json(moving), sc);
}

TEST(Session, PauseResumeReset) {
  Session s("x", three_link());
  s.handle({{"type", "set_target"}, {"pos", {0.0, 1.0}}});
  s.tick();
  EXPECT_EQ(s.handle({{"type", "pause"}})["status"], "paused");
  EXPECT_EQ(to_json(s.snapshot())["status"], "paused");
  const Vector held = s.snapshot().head;
  for (int k = 0; k < 5; ++k) s.tick();
  EXPECT_EQ(s.snapshot().head, held);
  EXPECT_EQ(s.handle({{"type", "resume"}})["status"], "running");
  s.tick();
  EXPECT_NE(s.snapshot().head, held);
  EXPECT_EQ(s.handle({{"type", "reset"}})["type"], "ack");
  EXPECT_LE((s.snapshot().head - testing::vec({1.5, 0.0})).norm(), 1e-15);
  EXPECT_EQ(s.snapshot().energy, 0.0);
  EXPECT_EQ(s.log().size(), 1u);
}

TEST(Session, SetParams) {
  Session s("x", three_link());
  const Json ack = s.handle({{"type", "set_params"}, {"k", 2.0}, {"v_max", 0.5}});
  EXPECT_EQ(ack["k"], 2.0);
  EXPECT_EQ(ack["v_max"], 0.5);
  EXPECT_DOUBLE_EQ(s.params().v_max, 0.5);
  const Json bad = s.handle({{"type", "set_params"}, {"k", "fast"}});
  EXPECT_EQ(bad["type"], "error");
}

TEST(Session, ProtocolErrorsEchoTheMessage) {
  Session s("x", three_link());
  const Json unknown = {{"type", "dance"}};
  EXPECT_EQ(s.handle(unknown)["type"], "error");
  EXPECT_EQ(s.handle(unknown)["echo"], unknown);
  const Json no_type = {{"pos", {1, 2}}};
  EXPECT_EQ(s.handle(no_type)["echo"], no_type);
  const Json wrong_dim = {{"type", "set_target"}, {"pos", {1.0, 2.0, 3.0}}};
  EXPECT_EQ(s.handle(wrong_dim)["type"], "error");
  EXPECT_EQ(s.handle(Json::array({1, 2}))["type"], "error");
  EXPECT_EQ(s.handle({{"type", "set_target"}, {"pos", {"a", 1.0}}})["type"], "error");
}

TEST(SnapshotChannel, LatestOnly) {
  SnapshotChannel ch;
  std::uint64_t seen = 0;
  EXPECT_FALSE(ch.next(seen, 0.01).has_value());
  ch.publish({{"n", 1}});
  ch.publish({{"n", 2}});
  auto got = ch.next(seen, 0.01);
  ASSERT_TRUE(got.has_value());
  EXPECT_EQ((*got)["n"], 2);
  EXPECT_FALSE(ch.next(seen, 0.01).has_value());
  std::thread producer([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    ch.publish({{"n", 3}});
  });
  got = ch.next(seen, 2.0);
  producer.join();
  ASSERT_TRUE(got.has_value());
  EXPECT_EQ((*got)["n"], 3);
  ch.close();
  EXPECT_TRUE(ch.closed());
  EXPECT_FALSE(ch.next(seen, 0.01).has_value());
}

TEST(SessionManager, ManualTicksAndIds) {
  SessionManager m;
  const std::string a = m.create(three_link(), {}, false);
  const std::string b = m.create(three_link(), {}, false);
  EXPECT_NE(a, b);
  EXPECT_EQ(m.ids().size(), 2u);
  m.message(a, {{"type", "set_target"}, {"pos", {0.0, 1.5}}});
  for (int k = 0; k < 10; ++k) m.tick(a);
  EXPECT_EQ(m.snapshot(a)["tick"], 10);
  EXPECT_EQ(m.snapshot(b)["tick"], 0);
  EXPECT_EQ(m.log(a).size(), 11u);
  EXPECT_EQ(m.reset(a)["tick"], 0);
  EXPECT_THROW(m.message("nope", {{"type", "pause"}}), std::out_of_range);
  EXPECT_TRUE(m.remove(a));
  EXPECT_FALSE(m.remove(a));
  EXPECT_FALSE(m.exists(a));
  EXPECT_TRUE(m.exists(b));
}

TEST(SessionManager, TickerAdvancesAndPublishes) {
  SessionManager m;
  SessionParams p;
  p.tick_hz = 200.0;
  const std::string id = m.create(three_link(), p);
  m.message(id, {{"type", "set_target"}, {"pos", {0.0, 1.5}}});
  auto ch = m.channel(id);
  std::uint64_t seen = 0;
  std::uint64_t last_tick = 0;
  for (int k = 0; k < 5; ++k) {
    auto snap = ch->next(seen, 2.0);
    ASSERT_TRUE(snap.has_value());
    EXPECT_GE((*snap)["tick"].get<std::uint64_t>(), last_tick);
    last_tick = (*snap)["tick"].get<std::uint64_t>();
  }
  EXPECT_GT(last_tick, 0u);
  EXPECT_TRUE(m.remove(id));
  EXPECT_TRUE(ch->closed());
}

class HttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SessionParams p;
    p.tick_hz = 100.0;
    service_ = std::make_unique<HttpService>(manager_, p);
    port_ = service_->start("127.0.0.1", 0);
    ASSERT_GT(port_, 0);
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(10, 0);
  }
  void TearDown() override { service_->stop(); }

  std::string create() {
    auto res = client_->Post("/sessions", canonical_dump(three_link_json(), -1), "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 201);
    return Json::parse(res->body)["id"].get<std::string>();
  }

  SessionManager manager_;
  std::unique_ptr<HttpService> service_;
  std::unique_ptr<httplib::Client> client_;
  int port_ = 0;
};

TEST_F(HttpTest, Lifecycle) {
  const std::string id = create();
  auto list = client_->Get("/sessions");
  ASSERT_TRUE(list);
  EXPECT_EQ(Json::parse(list->body)["sessions"], Json({id}));
  EXPECT_EQ(list->get_header_value("Access-Control-Allow-Origin"), "*");

  auto snap = client_->Get("/sessions/" + id);
  ASSERT_TRUE(snap);
  EXPECT_EQ(snap->status, 200);
  expect_valid_snapshot(Json::parse(snap->body), three_link());

  auto reset = client_->Post("/sessions/" + id + "/reset", "", "application/json");
  ASSERT_TRUE(reset);
  EXPECT_EQ(reset->status, 200);

  auto del = client_->Delete("/sessions/" + id);
  ASSERT_TRUE(del);
  EXPECT_EQ(del->status, 200);
  auto gone = client_->Get("/sessions/" + id);
  ASSERT_TRUE(gone);
  EXPECT_EQ(gone->status, 404);
  EXPECT_EQ(client_->Delete("/sessions/" + id)->status, 404);
  EXPECT_EQ(client_->Post("/sessions/zz/stream", "{\"type\":\"pause\"}", "application/json")->status, 404);
  EXPECT_EQ(client_->Get("/sessions/zz/stream")->status, 404);
  EXPECT_EQ(client_->Options("/sessions")->status, 204);
}

TEST_F(HttpTest, CreateValidation) {
  Json bad = three_link_json();
  bad["initial"][0] = {0.9, 0.0};
  auto res = client_->Post("/sessions", bad.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(Json::parse(res->body)["path"], "initial[0]");
  EXPECT_EQ(client_->Post("/sessions", "{nope", "application/json")->status, 400);

  Json wrapped = {{"scenario", three_link_json()}, {"params", {{"k", 2.0}}}};
  auto ok = client_->Post("/sessions", wrapped.dump(), "application/json");
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 201);
}

TEST_F(HttpTest, MessagesAndStream) {
  const std::string id = create();
  const std::string body = "{\"type\":\"set_target\",\"pos\":[0.0,1.5]}\n{broken\n{\"type\":\"warp\"}\n";
  auto res = client_->Post("/sessions/" + id + "/stream", body, "application/x-ndjson");
  ASSERT_TRUE(res);
  std::stringstream ss(res->body);
  std::string line;
  std::vector<Json> replies;
  while (std::getline(ss, line)) replies.push_back(Json::parse(line));
  ASSERT_EQ(replies.size(), 3u);
  EXPECT_EQ(replies[0]["type"], "ack");
  EXPECT_EQ(replies[1]["type"], "error");
  EXPECT_EQ(replies[1]["echo"], "{broken");
  EXPECT_EQ(replies[2]["type"], "error");

  auto single = client_->Post("/sessions/" + id + "/stream", "{\"type\":\"resume\"}", "application/json");
  ASSERT_TRUE(single);
  EXPECT_EQ(Json::parse(single->body)["of"], "resume");

  auto stream = client_->Get("/sessions/" + id + "/stream?limit=4");
  ASSERT_TRUE(stream);
  EXPECT_EQ(stream->status, 200);
  std::stringstream sl(stream->body);
  int count = 0;
  std::uint64_t last = 0;
  while (std::getline(sl, line)) {
    const Json s = Json::parse(line);
    expect_valid_snapshot(s, three_link());
    EXPECT_GE(s["tick"].get<std::uint64_t>(), last);
    last = s["tick"].get<std::uint64_t>();
    ++count;
  }
  EXPECT_EQ(count, 4);
  EXPECT_EQ(client_->Get("/sessions/" + id + "/stream?limit=abc")->status, 400);

  auto log = client_->Get("/sessions/" + id + "/log");
  ASSERT_TRUE(log);
  std::stringstream ls(log->body);
  double t = -1.0;
  while (std::getline(ls, line)) {
    const Json r = Json::parse(line);
    EXPECT_GE(r["t"].get<double>(), t);
    t = r["t"].get<double>();
    EXPECT_TRUE(r.contains("config"));
  }
  EXPECT_GT(t, 0.0);
}

}  // namespace
}  // namespace charm
