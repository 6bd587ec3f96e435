#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <mutex>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "proxauth/auth/service.hpp"

namespace proxauth::auth {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// "host:port"; throws AuthError("InvalidAddress").
  static Endpoint parse(std::string_view text);
  std::string to_string() const { return host + ":" + std::to_string(port); }
};

/// Line-delimited JSON over TCP, one thread per connection.  The socket is
/// bound and listening once the constructor returns, so port 0 can be used
/// and the chosen port read back with port().
class Server {
public:
  Server(AuthService& service, const Endpoint& listen);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const noexcept { return port_; }

  /// Accept loop; returns after stop().
  void serve();
  void stop();

private:
  void handle_connection(int fd);

  AuthService& service_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex connections_mutex_;
  std::list<int> open_fds_;
  std::list<std::jthread> workers_;
};

/// Blocking request/response client holding one connection.
class Client {
public:
  explicit Client(const Endpoint& server);
  ~Client();

  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  /// Throws AuthError("ConnectionError") on transport failure.
  nlohmann::json call(const nlohmann::json& request);

private:
  int fd_ = -1;
  std::string buffer_;
};

}  // namespace proxauth::auth
