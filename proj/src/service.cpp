#include "atlas/service.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <regex>
#include <thread>
#include <unordered_map>
#include <vector>

#include "atlas/records.hpp"
#include "httplib.h"

namespace atlas {

namespace {

using records::json;

Response json_response(int status, const json& body) {
  Response r;
  r.status = status;
  r.body = body.dump();
  return r;
}

Response error_response(int status, const std::string& kind, const std::string& msg) {
  return json_response(status, {{"error", kind}, {"message", msg}});
}

bool parse_int64(const std::string& s, int64_t& out) {
  if (s.empty() || s.size() > 19) return false;
  size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  for (size_t k = i; k < s.size(); ++k)
    if (s[k] < '0' || s[k] > '9') return false;
  out = std::stoll(s);
  return true;
}

struct Job {
  enum class State { Pending, Done, Failed } state = State::Pending;
  json request;
  json result;
  json error;
};

}  // namespace

// Jobs run FIFO on a fixed pool; a single mutex guards the table and queue.
struct Service::Impl {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> queue;
  std::unordered_map<std::string, Job> jobs;
  long next_id = 1;
  bool shutting_down = false;
  std::vector<std::thread> workers;
  std::unique_ptr<TileCache> cache;
  httplib::Server* server = nullptr;

  void worker() {
    for (;;) {
      std::string id;
      json req;
      {
        std::unique_lock lk(mu);
        cv.wait(lk, [&] { return shutting_down || !queue.empty(); });
        if (shutting_down) return;
        id = queue.front();
        queue.pop_front();
        req = jobs[id].request;
      }
      Job::State st = Job::State::Done;
      json result, err;
      try {
        result = records::run_analysis(req);
      } catch (const Error& e) {
        st = Job::State::Failed;
        err = records::error_body(e);
      } catch (const std::exception& e) {
        st = Job::State::Failed;
        err = {{"error", "Internal"}, {"message", e.what()}};
      }
      std::lock_guard lk(mu);
      auto& j = jobs[id];
      j.state = st;
      j.result = std::move(result);
      j.error = std::move(err);
    }
  }

  std::string submit(json req) {
    std::lock_guard lk(mu);
    std::string id = "job-" + std::to_string(next_id++);
    jobs[id].request = std::move(req);
    queue.push_back(id);
    cv.notify_one();
    return id;
  }
};

Service::Service(ServiceConfig cfg) : cfg_(std::move(cfg)), impl_(std::make_unique<Impl>()) {
  if (!cfg_.cache_dir.empty()) impl_->cache = std::make_unique<TileCache>(cfg_.cache_dir);
  int n = std::max(1, cfg_.job_workers);
  for (int k = 0; k < n; ++k) impl_->workers.emplace_back([this] { impl_->worker(); });
}

Service::~Service() {
  stop();
  {
    std::lock_guard lk(impl_->mu);
    impl_->shutting_down = true;
  }
  impl_->cv.notify_all();
  for (auto& t : impl_->workers) t.join();
}

namespace {

Response handle_tile(const Request& req, const std::smatch& m, const ServiceConfig& cfg,
                     const TileCache* cache) {
  TileKey key;
  int64_t zoom = 0;
  try {
    key.family = parse_family(m[1]);
    key.plane = parse_plane(m[2]);
    auto t = req.query.find("tier");
    key.tier = t == req.query.end() ? Tier::Standard : parse_tier(t->second);
    auto a = req.query.find("anchor");
    if (key.plane == Plane::Dynamical) {
      if (a == req.query.end())
        return error_response(400, "InvalidArgument", "anchor is required for dyn tiles");
      key.anchor = parse_complex(a->second);
    } else if (a != req.query.end()) {
      return error_response(400, "InvalidArgument", "anchor is only accepted for dyn tiles");
    }
  } catch (const Error& e) {
    return json_response(400, records::error_body(e));
  }
  if (!parse_int64(m[3], zoom) || !parse_int64(m[4], key.x) || !parse_int64(m[5], key.y) ||
      zoom < 0)
    return error_response(400, "InvalidArgument", "malformed tile coordinates");
  if (zoom > cfg.world.max_zoom)
    return error_response(422, "InvalidArgument",
                          "zoom exceeds the configured maximum " +
                              std::to_string(cfg.world.max_zoom));
  key.zoom = int(zoom);
  if (key.plane == Plane::Dynamical && key.family == Family::Newton &&
      !Parameter::newton(key.anchor).in_u)
    return error_response(422, "OutsideDomain", "anchor lies outside the Newton domain");
  try {
    tile_viewport(key, cfg.world);
  } catch (const Error& e) {
    return json_response(404, records::error_body(e));
  }

  std::string etag = tile_etag(key, cfg.world);
  Response r;
  r.content_type = "image/png";
  r.headers["ETag"] = etag;
  r.headers["Cache-Control"] = "public, max-age=31536000, immutable";
  if (!req.if_none_match.empty() &&
      (req.if_none_match == etag || req.if_none_match == "*")) {
    r.status = 304;
    return r;
  }
  std::string ck = key.canonical() + "|" + kPaletteVersion + "|" + cfg.world.hash();
  if (cache)
    if (auto hit = cache->load(ck)) {
      r.body = std::move(*hit);
      return r;
    }
  try {
    r.body = encode_png(render_tile(key, cfg.world, cfg.render_threads));
  } catch (const Error& e) {
    return json_response(422, records::error_body(e));
  }
  if (cache) {
    try {
      cache->store(ck, r.body);
    } catch (const Error&) {
      // a read-only cache only costs a re-render
    }
  }
  return r;
}

Response handle_classify(const Request& req) {
  auto fam = req.query.find("family");
  auto par = req.query.find("param");
  if (fam == req.query.end() || par == req.query.end())
    return error_response(400, "InvalidArgument", "family and param are required");
  try {
    Family f = parse_family(fam->second);
    cplx v = parse_complex(par->second);
    auto t = req.query.find("tier");
    Tier tier = t == req.query.end() ? Tier::Standard : parse_tier(t->second);
    return json_response(200, records::query_result(f, v, tier));
  } catch (const Error& e) {
    int status = e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::NonFiniteParameter
                     ? 400
                     : 422;
    return json_response(status, records::error_body(e));
  }
}

}  // namespace

Response Service::handle(const Request& req) {
  static const std::regex tile_re(R"(^/tiles/([^/]+)/([^/]+)/([^/]+)/([^/]+)/([^/]+)$)");
  static const std::regex job_re(R"(^/analyze/([^/]+)$)");
  std::smatch m;
  if (req.method == "GET" && std::regex_match(req.path, m, tile_re))
    return handle_tile(req, m, cfg_, impl_->cache.get());
  if (req.method == "GET" && req.path.rfind("/tiles/", 0) == 0)
    return error_response(400, "InvalidArgument", "expected /tiles/{family}/{plane}/{zoom}/{x}/{y}");
  if (req.method == "GET" && req.path == "/classify") return handle_classify(req);
  if (req.method == "POST" && req.path == "/analyze") {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) return error_response(400, "InvalidArgument", "body is not JSON");
    try {
      records::validate_analysis(body);
    } catch (const Error& e) {
      return json_response(400, records::error_body(e));
    }
    std::string id = impl_->submit(body);
    auto r = json_response(202, {{"id", id}, {"status", "pending"}});
    r.headers["Location"] = "/analyze/" + id;
    return r;
  }
  if (req.method == "GET" && std::regex_match(req.path, m, job_re)) {
    std::lock_guard lk(impl_->mu);
    auto it = impl_->jobs.find(m[1]);
    if (it == impl_->jobs.end()) return error_response(404, "NotFound", "unknown job id");
    const Job& j = it->second;
    json out = {{"id", it->first}};
    switch (j.state) {
      case Job::State::Pending: out["status"] = "pending"; break;
      case Job::State::Done:
        out["status"] = "done";
        out["result"] = j.result;
        break;
      case Job::State::Failed:
        out["status"] = "failed";
        out["error"] = j.error;
        break;
    }
    return json_response(200, out);
  }
  if (req.method == "GET" && req.path == "/health")
    return json_response(200, {{"status", "ok"},
                               {"palette_version", kPaletteVersion},
                               {"world", cfg_.world.hash()},
                               {"max_zoom", cfg_.world.max_zoom}});
  return error_response(404, "NotFound", "no route for " + req.method + " " + req.path);
}

void Service::serve(const std::string& host, int port, void (*on_bound)(int, void*),
                    void* ctx) {
  httplib::Server srv;
  auto forward = [this](const httplib::Request& hr, httplib::Response& hres) {
    Request req;
    req.method = hr.method;
    req.path = hr.path;
    for (const auto& [k, v] : hr.params) req.query.emplace(k, v);
    req.body = hr.body;
    req.if_none_match = hr.get_header_value("If-None-Match");
    Response r = handle(req);
    hres.status = r.status;
    for (const auto& [k, v] : r.headers) hres.set_header(k, v);
    hres.set_content(r.body, r.content_type);
  };
  srv.Get(".*", forward);
  srv.Post(".*", forward);
  int bound = port;
  if (port == 0) {
    bound = srv.bind_to_any_port(host);
  } else if (!srv.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) fail(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  {
    std::lock_guard lk(impl_->mu);
    impl_->server = &srv;
  }
  if (on_bound) on_bound(bound, ctx);
  srv.listen_after_bind();
  std::lock_guard lk(impl_->mu);
  impl_->server = nullptr;
}

void Service::stop() {
  std::lock_guard lk(impl_->mu);
  if (impl_->server) impl_->server->stop();
}

}  // namespace atlas
