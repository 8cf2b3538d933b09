// Copyright 2026 The lfo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Line-oriented TCP protocol exposing environments to remote clients.
//
// Every request and every response is a single JSON object terminated by
// '\n'. Requests carry "v":1 and an "op" of make, spec, reset, step or
// close. Responses carry "ok":true plus results, or "ok":false and an
// "error" string. Sessions live on the connection that created them and
// are dropped when it closes.
//
//   -> {"v":1,"op":"make","env":"cartpole","seed":7}
//   <- {"ok":true,"session":"s1","spec":{...},"obs":[...]}
//   -> {"v":1,"op":"step","session":"s1","action":1}
//   <- {"ok":true,"obs":[...],"reward":1.0,"done":false,"info":{}}

#include <atomic>
#include <chrono>
#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>

#include <nlohmann/json.hpp>

#include "lfo/envs.hpp"
#include "lfo/types.hpp"

namespace lfo::envwire {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::uint16_t kDefaultPort = 7464;
inline constexpr std::size_t kMaxLineBytes = 1 << 20;

struct Session {
  std::string id;
  envs::Environment env;
  RngSeed last_seed;
  std::chrono::system_clock::time_point created;
};

/// Sessions of one connection plus the request dispatcher. Transport-free
/// so it can be driven directly.
class SessionTable {
 public:
  /// Handles one request line and returns one response line (no '\n').
  std::string handle(std::string_view line);
  nlohmann::json handle(const nlohmann::json& request);

  std::size_t size() const { return sessions_.size(); }

 private:
  Session& lookup(const nlohmann::json& request);

  std::map<std::string, Session> sessions_;
  std::uint64_t next_id_ = 1;
};

/// Multi-connection server, one handler thread per connection.
class Server {
 public:
  /// Binds and listens immediately; port 0 picks an ephemeral port.
  /// Throws std::runtime_error when the address cannot be bound.
  Server(const std::string& bind_address, std::uint16_t port);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const { return port_; }

  /// Accepts connections until stop() is called.
  void run();
  /// Runs in a background thread.
  void start();
  void stop();

 private:
  struct Connection {
    std::jthread thread;
    std::atomic<bool> finished{false};
  };

  void serve_connection(int fd, Connection& self);
  void reap(bool all);

  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex connections_mutex_;
  std::list<std::unique_ptr<Connection>> connections_;
  std::jthread runner_;
};

/// Socket, framing or decoding failure.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The server answered with "ok":false.
class ServerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Client {
 public:
  Client(const std::string& host, std::uint16_t port);
  ~Client();

  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  struct Made {
    std::string session;
    EnvSpec spec;
    Observation observation;
  };

  Made make(std::string_view env_id, RngSeed seed);
  EnvSpec spec(std::string_view env_id);
  Observation reset(const std::string& session, RngSeed seed);
  StepResult step(const std::string& session, ActionId action);
  void close(const std::string& session);

  /// Sends one request object; returns the response when "ok" is true and
  /// throws ServerError otherwise.
  nlohmann::json call(nlohmann::json request);

  /// Raw exchange of one line each way.
  std::string exchange(std::string_view line);

 private:
  int fd_ = -1;
  std::string buffer_;
};

}  // namespace lfo::envwire
