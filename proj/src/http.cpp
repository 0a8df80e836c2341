#include <ostream>

#include <httplib.h>

#include "theoria/service.hpp"

namespace theoria {

struct HttpServer::Impl {
  httplib::Server server;
  bool static_ok = true;
};

HttpServer::HttpServer(Service& service, const std::string& static_dir) : impl_(std::make_unique<Impl>()) {
  if (!static_dir.empty()) impl_->static_ok = impl_->server.set_mount_point("/", static_dir);
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    Service::Response r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  impl_->server.Get(R"(/pos(/.*)?)", forward);
  impl_->server.Post(R"(/pos/.*)", forward);
  impl_->server.Post("/replay", forward);
}

HttpServer::~HttpServer() = default;

bool HttpServer::serves_static() const { return impl_->static_ok; }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  impl_->server.stop();
}

int serve_http(Service& service, const std::string& host, int port, const std::string& static_dir,
               std::ostream& err) {
  HttpServer server(service, static_dir);
  if (!server.serves_static()) {
    err << "cannot serve static files from " << static_dir << "\n";
    return 2;
  }
  const int bound = server.bind(host, port);
  if (bound < 0) {
    err << "cannot listen on " << host << ":" << port << "\n";
    return 2;
  }
  err << "listening on http://" << host << ":" << bound << "\n";
  server.listen();
  return 0;
}

}  // namespace theoria
