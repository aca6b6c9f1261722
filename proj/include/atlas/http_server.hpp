#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "atlas/api.hpp"

namespace atlas {

/// HTTP/1.1 front end that forwards every request to an ApiService.
class HttpServer {
 public:
  explicit HttpServer(const ApiService& api);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Serves files under `dir` for paths outside the API.
  void mount_static(const std::filesystem::path& dir);

  /// Binds the socket; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);

  /// Blocks until stop() is called.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace atlas
