#include "atlas/http_server.hpp"

#include <algorithm>
#include <cctype>

#include <httplib.h>

#include "atlas/error.hpp"

namespace atlas {

struct HttpServer::Impl {
  const ApiService& api;
  httplib::Server server;

  explicit Impl(const ApiService& a) : api(a) {
    auto forward = [this](const httplib::Request& in, httplib::Response& out) {
      HttpRequest req;
      req.method = in.method;
      req.path = in.path;
      for (const auto& [k, v] : in.params) req.query.emplace(k, v);
      for (const auto& [k, v] : in.headers) {
        std::string name = k;
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        req.headers.emplace(std::move(name), v);
      }
      req.body = in.body;
      const auto res = api.handle(req);
      out.status = res.status;
      for (const auto& [k, v] : res.headers) out.set_header(k, v);
      out.set_content(res.body, res.contentType);
    };
    server.Get(".*", forward);
    server.Post(".*", forward);
  }
};

HttpServer::HttpServer(const ApiService& api) : impl_(std::make_unique<Impl>(api)) {}
HttpServer::~HttpServer() = default;

void HttpServer::mount_static(const std::filesystem::path& dir) {
  if (!impl_->server.set_mount_point("/", dir.string()))
    throw Error(Errc::IoError, "api", "cannot serve static files from " + dir.string());
}

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(Errc::IoError, "api", "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace atlas
