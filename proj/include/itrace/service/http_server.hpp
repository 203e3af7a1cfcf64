#pragma once

#include <memory>
#include <string>
#include <thread>

#include "itrace/service/session_service.hpp"

namespace httplib {
class Server;
}

namespace itrace::service {

/// Maps library errors to HTTP status codes: validation and parse errors
/// 422, undecodable media 415, unknown ids 404, state conflicts 409,
/// anything else 500.
int status_for(const std::exception& e);

/// HTTP front end for a SessionService. Serves on a background thread.
class HttpServer {
 public:
  HttpServer(SessionService& service, std::string host, int port);
  ~HttpServer();

  /// Binds (port 0 picks a free port) and starts serving; returns the port.
  int start();
  void stop();
  int port() const { return port_; }

 private:
  void routes();

  SessionService& service_;
  std::string host_;
  int port_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace itrace::service
