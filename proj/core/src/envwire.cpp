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

#include "lfo/envwire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "lfo/codec.hpp"

namespace lfo::envwire {

using nlohmann::json;

namespace {

constexpr int kPollMillis = 100;

json error_response(std::string_view message) {
  return {{"ok", false}, {"error", message}};
}

// Request-level failure reported back to the client.
struct RequestError {
  std::string message;
};

const json& field(const json& request, const char* name) {
  auto it = request.find(name);
  if (it == request.end()) throw RequestError{std::string("missing field: ") + name};
  return *it;
}

std::string string_field(const json& request, const char* name) {
  const auto& v = field(request, name);
  if (!v.is_string()) throw RequestError{std::string("field must be a string: ") + name};
  return v.get<std::string>();
}

std::uint64_t seed_field(const json& request, std::uint64_t fallback) {
  auto it = request.find("seed");
  if (it == request.end()) return fallback;
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer() && it->get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(it->get<std::int64_t>());
  }
  throw RequestError{"seed must be a non-negative integer"};
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// SessionTable

Session& SessionTable::lookup(const json& request) {
  auto it = sessions_.find(string_field(request, "session"));
  if (it == sessions_.end()) throw RequestError{"unknown session"};
  return it->second;
}

json SessionTable::handle(const json& request) {
  if (!request.is_object()) return error_response("malformed request");
  auto v = request.find("v");
  if (v == request.end() || !v->is_number_integer() || v->get<int>() != kProtocolVersion) {
    return error_response("unsupported protocol version");
  }
  try {
    const std::string op = string_field(request, "op");
    if (op == "make") {
      const std::string env_id = string_field(request, "env");
      const RngSeed seed{seed_field(request, 0)};
      std::string id = "s" + std::to_string(next_id_++);
      Session session{id, envs::Environment(env_id), seed, std::chrono::system_clock::now()};
      const Observation obs = session.env.reset(seed);
      json spec = codec::encode(session.env.spec());
      sessions_.emplace(id, std::move(session));
      return {{"ok", true}, {"session", id}, {"spec", std::move(spec)}, {"obs", codec::encode(obs)}};
    }
    if (op == "spec") {
      if (request.contains("session")) {
        return {{"ok", true}, {"spec", codec::encode(lookup(request).env.spec())}};
      }
      return {{"ok", true}, {"spec", codec::encode(envs::spec(string_field(request, "env")))}};
    }
    if (op == "reset") {
      Session& s = lookup(request);
      s.last_seed = RngSeed{seed_field(request, s.last_seed.value + 1)};
      return {{"ok", true}, {"obs", codec::encode(s.env.reset(s.last_seed))}};
    }
    if (op == "step") {
      Session& s = lookup(request);
      const auto& a = field(request, "action");
      if (!a.is_number_integer()) throw RequestError{"invalid action"};
      const auto r = s.env.step(ActionId(a.get<int>()));
      return {{"ok", true},
              {"obs", codec::encode(r.observation)},
              {"reward", r.reward},
              {"done", r.done},
              {"info", codec::encode_info(r.info)}};
    }
    if (op == "close") {
      auto it = sessions_.find(string_field(request, "session"));
      if (it == sessions_.end()) throw RequestError{"unknown session"};
      sessions_.erase(it);
      return {{"ok", true}};
    }
    return error_response("unknown op: " + op);
  } catch (const RequestError& e) {
    return error_response(e.message);
  } catch (const EpisodeDoneError&) {
    return error_response("episode done");
  } catch (const std::exception& e) {
    return error_response(e.what());
  }
}

std::string SessionTable::handle(std::string_view line) {
  json request = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (request.is_discarded()) return error_response("malformed request").dump();
  return handle(request).dump();
}

// ---------------------------------------------------------------------------
// Server

Server::Server(const std::string& bind_address, std::uint16_t port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw std::runtime_error("invalid bind address: " + bind_address);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, 64) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(listen_fd_);
    throw std::runtime_error("cannot bind " + bind_address + ":" + std::to_string(port) + ": " +
                             reason);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Server::~Server() {
  stop();
  if (runner_.joinable()) runner_.join();
  reap(true);
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void Server::start() {
  runner_ = std::jthread([this] { run(); });
}

void Server::stop() { stopping_ = true; }

void Server::reap(bool all) {
  std::lock_guard lock(connections_mutex_);
  for (auto it = connections_.begin(); it != connections_.end();) {
    if (all || (*it)->finished) {
      if ((*it)->thread.joinable()) (*it)->thread.join();
      it = connections_.erase(it);
    } else {
      ++it;
    }
  }
}

void Server::run() {
  while (!stopping_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, kPollMillis);
    reap(false);
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    set_nodelay(fd);
    std::lock_guard lock(connections_mutex_);
    auto conn = std::make_unique<Connection>();
    Connection& ref = *conn;
    connections_.push_back(std::move(conn));
    ref.thread = std::jthread([this, fd, &ref] { serve_connection(fd, ref); });
  }
}

void Server::serve_connection(int fd, Connection& self) {
  SessionTable table;
  std::string buffer;
  char chunk[4096];
  bool open = true;
  while (open && !stopping_) {
    pollfd pfd{fd, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, kPollMillis);
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));

    std::size_t start = 0;
    for (auto nl = buffer.find('\n', start); nl != std::string::npos;
         nl = buffer.find('\n', start)) {
      std::string_view line(buffer.data() + start, nl - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      start = nl + 1;
      if (!send_all(fd, table.handle(line) + "\n")) {
        open = false;
        break;
      }
    }
    buffer.erase(0, start);
    if (buffer.size() > kMaxLineBytes) {
      send_all(fd, error_response("request line too long").dump() + "\n");
      break;
    }
  }
  ::close(fd);
  self.finished = true;
}

// ---------------------------------------------------------------------------
// Client

Client::Client(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0 || res == nullptr) {
    throw TransportError("cannot resolve " + host);
  }
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0 || ::connect(fd_, res->ai_addr, res->ai_addrlen) != 0) {
    const std::string reason = std::strerror(errno);
    ::freeaddrinfo(res);
    if (fd_ >= 0) ::close(fd_);
    throw TransportError("cannot connect to " + host + ":" + service + ": " + reason);
  }
  ::freeaddrinfo(res);
  set_nodelay(fd_);
}

Client::~Client() {
  if (fd_ >= 0) ::close(fd_);
}

std::string Client::exchange(std::string_view line) {
  std::string out(line);
  out.push_back('\n');
  if (!send_all(fd_, out)) throw TransportError("send failed");
  char chunk[4096];
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string response = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return response;
    }
    const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw TransportError("connection closed by server");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

json Client::call(json request) {
  request["v"] = kProtocolVersion;
  json response = json::parse(exchange(request.dump()), nullptr, false);
  if (response.is_discarded() || !response.is_object() || !response.contains("ok")) {
    throw TransportError("malformed response");
  }
  if (!response["ok"].get<bool>()) {
    throw ServerError(response.value("error", std::string("unspecified server error")));
  }
  return response;
}

Client::Made Client::make(std::string_view env_id, RngSeed seed) {
  auto r = call({{"op", "make"}, {"env", env_id}, {"seed", seed.value}});
  try {
    return {r.at("session").get<std::string>(), codec::decode_spec(r.at("spec")),
            codec::decode_observation(r.at("obs"))};
  } catch (const std::exception& e) {
    throw TransportError(std::string("bad make response: ") + e.what());
  }
}

EnvSpec Client::spec(std::string_view env_id) {
  auto r = call({{"op", "spec"}, {"env", env_id}});
  try {
    return codec::decode_spec(r.at("spec"));
  } catch (const std::exception& e) {
    throw TransportError(std::string("bad spec response: ") + e.what());
  }
}

Observation Client::reset(const std::string& session, RngSeed seed) {
  auto r = call({{"op", "reset"}, {"session", session}, {"seed", seed.value}});
  try {
    return codec::decode_observation(r.at("obs"));
  } catch (const std::exception& e) {
    throw TransportError(std::string("bad reset response: ") + e.what());
  }
}

StepResult Client::step(const std::string& session, ActionId action) {
  auto r = call({{"op", "step"}, {"session", session}, {"action", action.value()}});
  try {
    StepResult result;
    result.observation = codec::decode_observation(r.at("obs"));
    result.reward = r.at("reward").get<double>();
    result.done = r.at("done").get<bool>();
    const json info = r.value("info", json::object());
    for (const auto& item : info.items()) result.info[item.key()] = item.value().get<std::string>();
    return result;
  } catch (const std::exception& e) {
    throw TransportError(std::string("bad step response: ") + e.what());
  }
}

void Client::close(const std::string& session) { call({{"op", "close"}, {"session", session}}); }

}  // namespace lfo::envwire
