#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include "proxauth/auth/net.hpp"
#include "proxauth/auth/protocol.hpp"

namespace proxauth::auth {

namespace {

std::string errno_text() { return std::strerror(errno); }

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

// Reads until a full line is buffered.  Returns false on EOF, error, or an
// over-long line.
bool read_line(int fd, std::string& buffer, std::string& line) {
  for (;;) {
    if (const auto nl = buffer.find('\n'); nl != std::string::npos) {
      line.assign(buffer, 0, nl);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      buffer.erase(0, nl + 1);
      return true;
    }
    if (buffer.size() > kMaxMessageBytes) return false;
    char chunk[4096];
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

sockaddr_in resolve(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (::getaddrinfo(ep.host.c_str(), nullptr, &hints, &found) != 0 || !found) {
    throw AuthError("InvalidAddress", "cannot resolve host \"" + ep.host + "\"");
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(found->ai_addr)->sin_addr;
  ::freeaddrinfo(found);
  return addr;
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw AuthError("InvalidAddress", "expected host:port, got \"" + std::string(text) + "\"");
  }
  const auto port_text = text.substr(colon + 1);
  unsigned port = 0;
  auto [p, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || p != port_text.data() + port_text.size() || port > 65535) {
    throw AuthError("InvalidAddress", "bad port in \"" + std::string(text) + "\"");
  }
  return {std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

Server::Server(AuthService& service, const Endpoint& listen) : service_(service) {
  const sockaddr_in addr = resolve(listen);
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (listen_fd_ < 0) throw AuthError("ConnectionError", "socket: " + errno_text());
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listen_fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0 ||
      ::listen(listen_fd_, 64) < 0) {
    const auto why = errno_text();
    ::close(listen_fd_);
    throw AuthError("ConnectionError", "cannot listen on " + listen.to_string() + ": " + why);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

Server::~Server() {
  stop();
  workers_.clear();  // joins
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void Server::serve() {
  while (!stopping_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 100);
    if (ready <= 0) continue;
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(connections_mutex_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    open_fds_.push_back(fd);
    workers_.emplace_back([this, fd] { handle_connection(fd); });
  }
}

void Server::stop() {
  stopping_ = true;
  std::lock_guard lock(connections_mutex_);
  // Unblocks workers waiting in recv; they close their own descriptors.
  for (const int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
}

void Server::handle_connection(int fd) {
  std::string buffer;
  std::string line;
  while (!stopping_ && read_line(fd, buffer, line)) {
    if (line.empty()) continue;
    if (!send_all(fd, handle_line(service_, line) + "\n")) break;
  }
  if (buffer.size() > kMaxMessageBytes) {
    send_all(fd, error_response("InvalidRequest", "message too large").dump() + "\n");
  }
  std::lock_guard lock(connections_mutex_);
  open_fds_.remove(fd);
  ::close(fd);
}

Client::Client(const Endpoint& server) {
  const sockaddr_in addr = resolve(server);
  fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) throw AuthError("ConnectionError", "socket: " + errno_text());
  if (::connect(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0) {
    const auto why = errno_text();
    ::close(fd_);
    throw AuthError("ConnectionError", "cannot connect to " + server.to_string() + ": " + why);
  }
  const int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

Client::~Client() {
  if (fd_ >= 0) ::close(fd_);
}

nlohmann::json Client::call(const nlohmann::json& request) {
  if (!send_all(fd_, request.dump() + "\n")) {
    throw AuthError("ConnectionError", "send failed: " + errno_text());
  }
  std::string line;
  if (!read_line(fd_, buffer_, line)) {
    throw AuthError("ConnectionError", "connection closed before a response arrived");
  }
  auto response = nlohmann::json::parse(line, nullptr, false);
  if (response.is_discarded()) throw AuthError("ConnectionError", "malformed response");
  return response;
}

}  // namespace proxauth::auth
