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

#include "charm/service.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "charm/endpoint_map.hpp"
#include "charm/errors.hpp"

namespace charm {
namespace {

double number_field(const Json& j, const char* key, const std::string& path) {
  const Json& v = j.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) throw ValidationError(path + key, "expected a finite number");
  return v.get<double>();
}

double power(const Configuration& u, const Matrix& velocity) {
  return 0.5 * velocity.colwise().squaredNorm().dot(u.rule().weights().transpose());
}

}  // namespace

SessionParams parse_session_params(const Json& j, SessionParams base) {
  if (j.is_null()) return base;
  if (!j.is_object()) throw ValidationError("params", "expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string path = "params.";
    if (key == "tick_hz") {
      base.tick_hz = number_field(j, "tick_hz", path);
      if (!(base.tick_hz > 0.0 && base.tick_hz <= 10000.0)) throw ValidationError("params.tick_hz", "must be in (0, 10000]");
    } else if (key == "k") {
      base.gain = number_field(j, "k", path);
      if (base.gain < 0.0) throw ValidationError("params.k", "must be nonnegative");
    } else if (key == "v_max") {
      base.v_max = number_field(j, "v_max", path);
      if (!(base.v_max > 0.0)) throw ValidationError("params.v_max", "must be positive");
    } else if (key == "boundary_fraction") {
      base.boundary_fraction = number_field(j, "boundary_fraction", path);
      if (!(base.boundary_fraction > 0.0 && base.boundary_fraction < 1.0)) {
        throw ValidationError("params.boundary_fraction", "must be in (0, 1)");
      }
    } else if (key == "substeps") {
      if (!value.is_number_integer() || value.get<int>() < 1 || value.get<int>() > 1000) {
        throw ValidationError("params.substeps", "expected an integer in [1, 1000]");
      }
      base.substeps = value.get<int>();
    } else if (key == "axis_tolerance") {
      base.axis_tolerance = number_field(j, "axis_tolerance", path);
      if (!(base.axis_tolerance >= 0.0)) throw ValidationError("params.axis_tolerance", "must be nonnegative");
    } else {
      throw ValidationError("params." + key, "unknown parameter");
    }
  }
  return base;
}

std::string to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::kRunning:
      return "running";
    case SessionStatus::kPaused:
      return "paused";
    case SessionStatus::kSingularStopped:
      return "singular-stopped";
  }
  return "unknown";
}

Json to_json(const Snapshot& s) {
  Json j = {{"type", "state"},
            {"tick", s.tick},
            {"t", s.t},
            {"head", to_json(s.head)},
            {"segments", to_json_columns(s.config.values())},
            {"knot_points", to_json_columns(knot_points(s.config))},
            {"target", to_json(s.target)},
            {"energy", s.energy},
            {"margin", s.margin},
            {"tracking_error", s.tracking_error},
            {"status", to_string(s.status)},
            {"clamped", s.clamped}};
  if (s.axis) j["axis"] = to_json(*s.axis);
  return j;
}

Session::Session(std::string id, Scenario scenario, SessionParams params)
    : id_(std::move(id)),
      scenario_(std::move(scenario)),
      params_(params),
      u0_(initial_configuration(scenario_)),
      u_(u0_),
      tol_singular_(scenario_.tolerance("tol_singular")),
      snap_(u0_) {
  reset();
}

void Session::reset() {
  u_ = u0_;
  target_ = endpoint(u0_);
  clamped_ = false;
  status_ = SessionStatus::kRunning;
  ticks_ = 0;
  energy_ = 0.0;
  log_.clear();
  snap_ = Snapshot(u_);
  publish_state(u_, Vector::Zero(u_.dimension()));
}

void Session::set_target(const Vector& pos) {
  const double limit = u0_.length() * (1.0 - params_.boundary_fraction);
  const double r = pos.norm();
  if (r > limit) {
    target_ = pos * (limit / r);
    clamped_ = true;
  } else {
    target_ = pos;
    clamped_ = false;
  }
}

Vector Session::command(const Configuration& u) const {
  Vector cmd = params_.gain * (target_ - endpoint(u));
  const double n = cmd.norm();
  if (n > params_.v_max) cmd *= params_.v_max / n;
  return cmd;
}

Json Session::error(const std::string& message, const Json& echo) const {
  return {{"type", "error"}, {"message", message}, {"echo", echo}, {"session", id_}};
}

Json Session::handle(const Json& msg) {
  if (!msg.is_object()) return error("message must be a JSON object", msg);
  auto type_it = msg.find("type");
  if (type_it == msg.end() || !type_it->is_string()) return error("message needs a string \"type\"", msg);
  const std::string type = type_it->get<std::string>();
  Json ack = {{"type", "ack"}, {"of", type}, {"session", id_}};
  if (type == "set_target") {
    auto pos = msg.find("pos");
    if (pos == msg.end() || !pos->is_array() || static_cast<int>(pos->size()) != u_.dimension()) {
      return error("set_target needs \"pos\" with " + std::to_string(u_.dimension()) + " numbers", msg);
    }
    Vector p(u_.dimension());
    for (int k = 0; k < p.size(); ++k) {
      const Json& x = (*pos)[k];
      if (!x.is_number() || !std::isfinite(x.get<double>())) return error("set_target: non-numeric coordinate", msg);
      p(k) = x.get<double>();
    }
    set_target(p);
    ack["target"] = to_json(target_);
    ack["clamped"] = clamped_;
  } else if (type == "pause") {
    status_ = SessionStatus::kPaused;
  } else if (type == "resume") {
    if (status_ == SessionStatus::kPaused) status_ = SessionStatus::kRunning;
  } else if (type == "reset") {
    reset();
  } else if (type == "set_params") {
    Json params = msg;
    params.erase("type");
    try {
      params_ = parse_session_params(params, params_);
    } catch (const ValidationError& e) {
      return error(e.what(), msg);
    }
    ack["k"] = params_.gain;
    ack["v_max"] = params_.v_max;
  } else {
    return error("unknown message type \"" + type + "\"", msg);
  }
  snap_.status = status_;
  ack["status"] = to_string(status_);
  return ack;
}

void Session::publish_state(const Configuration& u, const Vector& w) {
  const GramData g = gram(u);
  snap_.tick = ticks_;
  snap_.config = u;
  snap_.head = endpoint(u);
  snap_.w = w;
  snap_.target = target_;
  snap_.energy = energy_;
  snap_.margin = g.margin;
  snap_.tracking_error = (snap_.head - target_).norm();
  snap_.status = status_;
  snap_.clamped = clamped_;
  if (status_ == SessionStatus::kSingularStopped) {
    snap_.axis = g.eigenvectors.col(0);
  } else {
    snap_.axis.reset();
  }
  log_.push_back(trajectory_record(snap_.t, snap_.head, u, w, snap_.margin, snap_.tracking_error, energy_));
  if (log_.size() > kMaxLog) log_.pop_front();
}

const Snapshot& Session::tick() {
  ++ticks_;
  if (status_ == SessionStatus::kPaused) {
    snap_.tick = ticks_;
    return snap_;
  }
  const double h = 1.0 / (params_.tick_hz * params_.substeps);
  // Lift of the command; at a singular point the axis component is dropped
  // (callers only get here when it is negligible).
  auto lift = [&](const Configuration& v) -> Lift {
    const Vector cmd = command(v);
    try {
      return lift_velocity(v, cmd, {tol_singular_, 0.0});
    } catch (const NoSolutionError& e) {
      return lift_velocity(v, cmd - e.axis().dot(cmd) * e.axis(), {tol_singular_, 0.0});
    }
  };
  auto field = [&](const Matrix& x) { return lift(u_.retract(x)).velocity.values(); };

  Vector w = Vector::Zero(u_.dimension());
  status_ = SessionStatus::kRunning;
  for (int s = 0; s < params_.substeps; ++s) {
    const GramData g = gram(u_);
    if (g.margin <= tol_singular_) {
      const Vector axis = g.eigenvectors.col(0);
      const Vector cmd = command(u_);
      if (std::abs(axis.dot(cmd)) > params_.axis_tolerance * cmd.norm()) {
        status_ = SessionStatus::kSingularStopped;
        break;
      }
    }
    const Lift l0 = lift(u_);
    const Matrix& x = u_.values();
    const Matrix k1 = l0.velocity.values();
    const Matrix k2 = field(x + 0.5 * h * k1);
    const Matrix k3 = field(x + 0.5 * h * k2);
    const Matrix k4 = field(x + h * k3);
    const double p0 = power(u_, k1);
    u_ = u_.retract(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    const Lift l1 = lift(u_);
    const double p1 = power(u_, l1.velocity.values());
    energy_ += 0.5 * h * (p0 + p1);
    w = l1.w;
  }
  snap_.t += 1.0 / params_.tick_hz;
  publish_state(u_, w);
  return snap_;
}

void SnapshotChannel::publish(Json snapshot) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    latest_ = std::move(snapshot);
    ++version_;
  }
  cv_.notify_all();
}

std::optional<Json> SnapshotChannel::next(std::uint64_t& seen, double timeout_seconds) {
  std::unique_lock<std::mutex> lock(mu_);
  const bool ready = cv_.wait_for(lock, std::chrono::duration<double>(timeout_seconds),
                                  [&] { return closed_ || version_ > seen; });
  if (!ready || version_ <= seen) return std::nullopt;
  seen = version_;
  return latest_;
}

void SnapshotChannel::close() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool SnapshotChannel::closed() const {
  std::lock_guard<std::mutex> lock(mu_);
  return closed_;
}

SessionManager::~SessionManager() {
  std::vector<std::string> all = ids();
  for (const std::string& id : all) remove(id);
}

std::string SessionManager::create(Scenario scenario, SessionParams params, bool start_ticker) {
  std::string id;
  {
    std::lock_guard<std::mutex> lock(mu_);
    id = "s" + std::to_string(next_id_++);
  }
  auto entry = std::make_shared<Entry>(Session(id, std::move(scenario), params));
  entry->channel->publish(to_json(entry->session.snapshot()));
  if (start_ticker) entry->ticker = std::thread(run_ticker, entry);
  {
    std::lock_guard<std::mutex> lock(mu_);
    sessions_[id] = entry;
  }
  spdlog::info("session {} created ({} Hz)", id, params.tick_hz);
  return id;
}

bool SessionManager::remove(const std::string& id) {
  std::shared_ptr<Entry> entry;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return false;
    entry = it->second;
    sessions_.erase(it);
  }
  entry->stop = true;
  entry->channel->close();
  if (entry->ticker.joinable()) entry->ticker.join();
  spdlog::info("session {} removed", id);
  return true;
}

bool SessionManager::exists(const std::string& id) const { return find(id) != nullptr; }

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

namespace {

template <typename E>
std::shared_ptr<E> require_entry(std::shared_ptr<E> e, const std::string& id) {
  if (!e) throw std::out_of_range("unknown session " + id);
  return e;
}

}  // namespace

Json SessionManager::message(const std::string& id, const Json& msg) {
  auto entry = require_entry(find(id), id);
  Json reply;
  Json snap;
  {
    std::lock_guard<std::mutex> lock(entry->mu);
    reply = entry->session.handle(msg);
    snap = to_json(entry->session.snapshot());
  }
  if (msg.is_object() && msg.value("type", "") == "reset") entry->channel->publish(std::move(snap));
  return reply;
}

Json SessionManager::reset(const std::string& id) {
  auto entry = require_entry(find(id), id);
  Json snap;
  {
    std::lock_guard<std::mutex> lock(entry->mu);
    entry->session.reset();
    snap = to_json(entry->session.snapshot());
  }
  entry->channel->publish(snap);
  return snap;
}

Json SessionManager::tick(const std::string& id) {
  auto entry = require_entry(find(id), id);
  Json snap;
  {
    std::lock_guard<std::mutex> lock(entry->mu);
    snap = to_json(entry->session.tick());
  }
  entry->channel->publish(snap);
  return snap;
}

Json SessionManager::snapshot(const std::string& id) const {
  auto entry = require_entry(find(id), id);
  std::lock_guard<std::mutex> lock(entry->mu);
  return to_json(entry->session.snapshot());
}

std::vector<Json> SessionManager::log(const std::string& id) const {
  auto entry = require_entry(find(id), id);
  std::lock_guard<std::mutex> lock(entry->mu);
  const auto& log = entry->session.log();
  return {log.begin(), log.end()};
}

std::shared_ptr<SnapshotChannel> SessionManager::channel(const std::string& id) const {
  return require_entry(find(id), id)->channel;
}

std::vector<std::string> SessionManager::ids() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, entry] : sessions_) out.push_back(id);
  return out;
}

void SessionManager::run_ticker(std::shared_ptr<Entry> entry) {
  using Clock = std::chrono::steady_clock;
  auto next = Clock::now();
  while (!entry->stop) {
    Json snap;
    std::chrono::duration<double> period;
    {
      std::lock_guard<std::mutex> lock(entry->mu);
      try {
        snap = to_json(entry->session.tick());
      } catch (const std::exception& e) {
        spdlog::error("session {}: tick failed: {}", entry->session.id(), e.what());
        return;
      }
      period = std::chrono::duration<double>(1.0 / entry->session.params().tick_hz);
    }
    entry->channel->publish(std::move(snap));
    next += std::chrono::duration_cast<Clock::duration>(period);
    const auto now = Clock::now();
    if (next < now) next = now;
    std::this_thread::sleep_until(next);
  }
}

}  // namespace charm
