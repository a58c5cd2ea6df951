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

#ifndef CHARM_SERVICE_HPP_
#define CHARM_SERVICE_HPP_

/**
 * @file
 * Live tracking sessions. Each tick commands the head velocity
 *
 *   c_dot = clamp(K_s (target - head), v_max)
 *
 * lifts it horizontally and advances the configuration by `substeps` rk4 steps.
 *
 * Client messages (JSON objects):
 *   {"type":"set_target","pos":[...]}
 *   {"type":"pause"}  {"type":"resume"}  {"type":"reset"}
 *   {"type":"set_params","k":real,"v_max":real}   (either key optional)
 * Replies are {"type":"ack","of":<type>,...} or
 * {"type":"error","message":...,"echo":<offending message>}.
 *
 * Snapshots:
 *   {"type":"state","t","head","segments","energy","margin","status",
 *    "clamped","target","tracking_error","knot_points","axis"?}
 * with status "running" | "paused" | "singular-stopped"; "axis" is present
 * only when singular-stopped.
 */

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "charm/scenario_io.hpp"

namespace charm {

struct SessionParams {
  double tick_hz = 60.0;
  double gain = 5.0;   ///< K_s
  double v_max = 2.0;  ///< head speed limit
  double boundary_fraction = kDefaultBoundaryFraction;
  int substeps = 4;    ///< rk4 steps per tick
  /// At a singular configuration the command counts as orthogonal to the
  /// axis when |<c_dot, axis>| <= axis_tolerance ||c_dot||.
  double axis_tolerance = 1e-3;
};

/// Reads "tick_hz", "k", "v_max", "boundary_fraction", "substeps",
/// "axis_tolerance" over `base`. @throws ValidationError.
SessionParams parse_session_params(const Json& j, SessionParams base = {});

enum class SessionStatus { kRunning, kPaused, kSingularStopped };

std::string to_string(SessionStatus status);

struct Snapshot {
  explicit Snapshot(Configuration c) : config(std::move(c)) {}

  std::uint64_t tick = 0;
  double t = 0.0;
  Vector head;
  Vector w;
  Vector target;
  double energy = 0.0;
  double margin = 0.0;
  double tracking_error = 0.0;
  SessionStatus status = SessionStatus::kRunning;
  bool clamped = false;
  std::optional<Vector> axis;
  Configuration config;
};

Json to_json(const Snapshot& s);

/**
 * The state machine of one session. Not synchronized: the owner serializes
 * calls (SessionManager does so per session).
 */
class Session {
 public:
  Session(std::string id, Scenario scenario, SessionParams params = {});

  const std::string& id() const { return id_; }
  const SessionParams& params() const { return params_; }
  SessionStatus status() const { return status_; }

  /// Applies one client message and returns the reply.
  Json handle(const Json& message);
  /// Advances one tick (no motion while paused) and returns the snapshot.
  const Snapshot& tick();
  void reset();

  const Snapshot& snapshot() const { return snap_; }
  /// Trajectory records (scenario_io JSONL schema), one per advancing tick,
  /// oldest dropped beyond kMaxLog.
  const std::deque<Json>& log() const { return log_; }

  static constexpr std::size_t kMaxLog = 100000;

 private:
  void set_target(const Vector& pos);
  Vector command(const Configuration& u) const;
  void publish_state(const Configuration& u, const Vector& w);
  Json error(const std::string& message, const Json& echo) const;

  std::string id_;
  Scenario scenario_;
  SessionParams params_;
  Configuration u0_;
  Configuration u_;
  double tol_singular_;
  Vector target_;
  bool clamped_ = false;
  SessionStatus status_ = SessionStatus::kRunning;
  std::uint64_t ticks_ = 0;
  double energy_ = 0.0;
  Snapshot snap_;
  std::deque<Json> log_;
};

/// Latest-only snapshot slot: writers never wait for readers.
class SnapshotChannel {
 public:
  void publish(Json snapshot);
  /// Waits until a snapshot newer than `seen` exists or the timeout passes;
  /// returns it and updates `seen`. Returns nullopt on timeout or close.
  std::optional<Json> next(std::uint64_t& seen, double timeout_seconds);
  void close();
  bool closed() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  Json latest_;
  std::uint64_t version_ = 0;
  bool closed_ = false;
};

/**
 * Owns sessions, one ticker thread per session. Messages and ticks of a
 * session are serialized by that session's mutex; sessions share nothing.
 */
class SessionManager {
 public:
  SessionManager() = default;
  ~SessionManager();
  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  /// @param start_ticker false leaves ticking to tick() (deterministic tests).
  std::string create(Scenario scenario, SessionParams params = {}, bool start_ticker = true);
  bool remove(const std::string& id);
  bool exists(const std::string& id) const;

  /// @throws std::out_of_range for an unknown id.
  Json message(const std::string& id, const Json& msg);
  Json reset(const std::string& id);
  Json tick(const std::string& id);
  Json snapshot(const std::string& id) const;
  std::vector<Json> log(const std::string& id) const;
  std::shared_ptr<SnapshotChannel> channel(const std::string& id) const;

  std::vector<std::string> ids() const;

 private:
  struct Entry {
    explicit Entry(Session s) : session(std::move(s)) {}
    mutable std::mutex mu;
    Session session;
    std::shared_ptr<SnapshotChannel> channel = std::make_shared<SnapshotChannel>();
    std::atomic<bool> stop{false};
    std::thread ticker;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  static void run_ticker(std::shared_ptr<Entry> entry);

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// HTTP transport for a SessionManager.
///
///   POST   /sessions                body: scenario, or {"scenario":..., "params":...}
///   GET    /sessions                list of ids
///   GET    /sessions/{id}           latest snapshot
///   POST   /sessions/{id}/reset
///   DELETE /sessions/{id}
///   GET    /sessions/{id}/stream    chunked NDJSON snapshots, latest-only
///                                   (?limit=n ends after n snapshots)
///   POST   /sessions/{id}/stream    one message or NDJSON messages; NDJSON replies
///   GET    /sessions/{id}/log       JSONL trajectory records
class HttpService {
 public:
  explicit HttpService(SessionManager& manager, SessionParams defaults = {});
  ~HttpService();

  /// Binds and serves on a background thread; returns the port.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  bool run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace charm

#endif  // CHARM_SERVICE_HPP_
