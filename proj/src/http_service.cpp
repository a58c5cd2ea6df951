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

#include <sstream>
#include <stdexcept>
#include <thread>

// Eigen before httplib: <resolv.h> defines a _res macro that collides with
// Eigen parameter names.
#include "charm/errors.hpp"
#include "charm/service.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace charm {

struct HttpService::Impl {
  SessionManager& manager;
  SessionParams defaults;
  httplib::Server server;
  std::thread thread;

  Impl(SessionManager& m, SessionParams d) : manager(m), defaults(d) { routes(); }

  static void send_json(httplib::Response& res, const Json& j, int status = 200) {
    res.status = status;
    res.set_content(canonical_dump(j, -1) + "\n", "application/json");
  }

  static void send_error(httplib::Response& res, int status, const std::string& message,
                         const Json& extra = Json::object()) {
    Json j = {{"type", "error"}, {"message", message}};
    for (const auto& [k, v] : extra.items()) j[k] = v;
    send_json(res, j, status);
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      Json body;
      try {
        body = Json::parse(req.body);
      } catch (const Json::parse_error& e) {
        send_error(res, 400, std::string("malformed JSON: ") + e.what());
        return;
      }
      try {
        const bool wrapped = body.is_object() && body.contains("scenario");
        const Scenario s = parse_scenario(wrapped ? body["scenario"] : body);
        const SessionParams p =
            parse_session_params(wrapped && body.contains("params") ? body["params"] : Json(), defaults);
        const std::string id = manager.create(s, p);
        send_json(res, {{"id", id}, {"snapshot", manager.snapshot(id)}}, 201);
      } catch (const ValidationError& e) {
        send_error(res, 400, e.what(), {{"path", e.path()}});
      } catch (const Error& e) {
        send_error(res, 400, e.what());
      }
    });

    server.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, {{"sessions", manager.ids()}});
    });

    server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, [&](const std::string& id) { send_json(res, manager.snapshot(id)); });
    });

    server.Delete(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      if (!manager.remove(id)) {
        send_error(res, 404, "unknown session " + id);
        return;
      }
      send_json(res, {{"deleted", id}});
    });

    server.Post(R"(/sessions/([^/]+)/reset)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, [&](const std::string& id) { send_json(res, manager.reset(id)); });
    });

    server.Get(R"(/sessions/([^/]+)/log)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, [&](const std::string& id) {
        std::string out;
        for (const Json& r : manager.log(id)) out += canonical_dump(r, -1) + "\n";
        res.set_content(out, "application/x-ndjson");
      });
    });

    server.Post(R"(/sessions/([^/]+)/stream)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, [&](const std::string& id) {
        std::string out;
        auto reply = [&](const Json& r) { out += canonical_dump(r, -1) + "\n"; };
        Json single;
        bool whole = true;
        try {
          single = Json::parse(req.body);
        } catch (const Json::parse_error&) {
          whole = false;
        }
        if (whole) {
          reply(manager.message(id, single));
        } else {
          std::stringstream ss(req.body);
          std::string line;
          while (std::getline(ss, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
              reply(manager.message(id, Json::parse(line)));
            } catch (const Json::parse_error&) {
              reply({{"type", "error"}, {"message", "malformed JSON"}, {"echo", line}, {"session", id}});
            }
          }
        }
        res.set_content(out, "application/x-ndjson");
      });
    });

    server.Get(R"(/sessions/([^/]+)/stream)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, [&](const std::string& id) {
        struct State {
          std::shared_ptr<SnapshotChannel> channel;
          std::uint64_t seen = 0;
          long long limit = -1;
          long long sent = 0;
        };
        auto state = std::make_shared<State>();
        state->channel = manager.channel(id);
        if (req.has_param("limit")) {
          try {
            state->limit = std::stoll(req.get_param_value("limit"));
          } catch (const std::exception&) {
            send_error(res, 400, "limit must be an integer");
            return;
          }
        }
        res.set_chunked_content_provider("application/x-ndjson", [state](std::size_t, httplib::DataSink& sink) {
          while (sink.is_writable()) {
            auto snap = state->channel->next(state->seen, 0.5);
            if (!snap) {
              if (state->channel->closed()) {
                sink.done();
                return true;
              }
              continue;
            }
            const std::string line = canonical_dump(*snap, -1) + "\n";
            if (!sink.write(line.data(), line.size())) return false;
            if (state->limit >= 0 && ++state->sent >= state->limit) {
              sink.done();
              return true;
            }
            return true;
          }
          return false;
        });
      });
    });
  }

  template <typename F>
  void with_session(const httplib::Request& req, httplib::Response& res, F&& f) {
    const std::string id = req.matches[1];
    try {
      f(id);
    } catch (const std::out_of_range&) {
      send_error(res, 404, "unknown session " + id);
    }
  }
};

HttpService::HttpService(SessionManager& manager, SessionParams defaults)
    : impl_(std::make_unique<Impl>(manager, defaults)) {}

HttpService::~HttpService() { stop(); }

int HttpService::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  spdlog::info("charm service listening on {}:{}", host, bound);
  return bound;
}

bool HttpService::run(const std::string& host, int port) {
  spdlog::info("charm service listening on {}:{}", host, port);
  return impl_->server.listen(host, port);
}

void HttpService::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace charm
