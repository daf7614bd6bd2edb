#pragma once

#include <atomic>
#include <memory>
#include <string>

#include "vsuspect/service.hpp"

namespace httplib {
class Server;
}

namespace vsuspect {

/// HTTP/JSON binding of SessionService.
///
///   GET  /scenarios
///   POST /sessions
///   GET  /sessions/{id}/templates
///   POST /sessions/{id}/statements
///   GET  /sessions/{id}/transcript?view=trainee|instructor
///   GET  /sessions/{id}/state[?from=n][&limit=k][&poll=1]
///
/// Tokens travel as `Authorization: Bearer <token>` (or `?token=`). The state
/// endpoint streams newline-delimited JSON records as turns complete,
/// starting at turn `from` (default 1) so a reconnecting client resumes
/// without gaps; `poll=1` returns the records available now as one document.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<SessionService> service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to host:port (port 0 picks a free port) and returns the port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); blocks.
  void listen();
  void stop();

 private:
  std::shared_ptr<SessionService> service_;
  std::unique_ptr<httplib::Server> server_;
  std::atomic<bool> stopping_{false};
};

}  // namespace vsuspect
