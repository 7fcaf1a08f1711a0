#pragma once

#include <map>
#include <memory>
#include <string>

#include "atlas/render.hpp"

namespace atlas {

struct ServiceConfig {
  WorldConfig world;
  std::string cache_dir;  // empty: no tile cache
  int job_workers = 4;
  int render_threads = 0;
};

struct Request {
  std::string method;  // GET / POST
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  std::string if_none_match;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

class Service {
 public:
  explicit Service(ServiceConfig cfg);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Transport-independent entry point; the HTTP server forwards here.
  Response handle(const Request& req);

  // Blocking HTTP/1.1 server. port 0 picks a free port; on_bound receives it.
  void serve(const std::string& host, int port, void (*on_bound)(int, void*) = nullptr,
             void* ctx = nullptr);
  void stop();

  const ServiceConfig& config() const { return cfg_; }

 private:
  struct Impl;
  ServiceConfig cfg_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace atlas
