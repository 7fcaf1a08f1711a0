#include "atlas/atlas.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include "atlas/records.hpp"
#include "atlas/service.hpp"

struct atlas_session {
  atlas::ServiceConfig cfg;
};

static_assert(int(atlas::ErrorCode::Internal) + 1 == ATLAS_E_INTERNAL);
static_assert(int(atlas::ErrorCode::OutOfWorld) + 1 == ATLAS_E_OUT_OF_WORLD);

namespace {

thread_local int g_code = ATLAS_OK;
thread_local std::string g_message;

int set_error(int code, const std::string& msg) {
  g_code = code;
  g_message = msg;
  return -1;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) return nullptr;
  std::memcpy(p, s.data(), s.size());
  p[s.size()] = '\0';
  return p;
}

template <class F>
int guarded(F&& body) {
  g_code = ATLAS_OK;
  g_message.clear();
  try {
    body();
    return 0;
  } catch (const atlas::Error& e) {
    return set_error(int(e.code()) + 1, e.what());
  } catch (const std::exception& e) {
    return set_error(ATLAS_E_INTERNAL, e.what());
  }
}

std::string need(const char* s, const char* what) {
  if (!s) atlas::fail(atlas::ErrorCode::InvalidArgument, std::string(what) + " is required");
  return s;
}

int parse_count(const char* v, const char* key) {
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (!*v || *end || n < 0 || n > 1 << 20)
    atlas::fail(atlas::ErrorCode::InvalidArgument, std::string("bad value for ") + key);
  return int(n);
}

}  // namespace

extern "C" {

int atlas_session_new(atlas_session** out) {
  return guarded([&] {
    if (!out) atlas::fail(atlas::ErrorCode::InvalidArgument, "null out pointer");
    auto* s = new atlas_session;
    if (const char* d = std::getenv("ATLAS_CACHE_DIR")) s->cfg.cache_dir = d;
    *out = s;
  });
}

void atlas_session_free(atlas_session* s) { delete s; }

int atlas_set_option(atlas_session* s, const char* key, const char* value) {
  return guarded([&] {
    std::string k = need(key, "key"), v = need(value, "value");
    if (!s) atlas::fail(atlas::ErrorCode::InvalidArgument, "null session");
    if (k == "threads") s->cfg.render_threads = parse_count(value, key);
    else if (k == "cache_dir") s->cfg.cache_dir = v;
    else if (k == "max_zoom") {
      int z = parse_count(value, key);
      if (z > 62) atlas::fail(atlas::ErrorCode::InvalidArgument, "max_zoom must be <= 62");
      s->cfg.world.max_zoom = z;
    } else if (k == "job_workers") s->cfg.job_workers = std::max(1, parse_count(value, key));
    else atlas::fail(atlas::ErrorCode::InvalidArgument, "unknown option '" + k + "'");
  });
}

int atlas_last_error_code(void) { return g_code; }
const char* atlas_last_error_message(void) { return g_message.c_str(); }
void atlas_free_string(char* p) { std::free(p); }

int atlas_classify(atlas_session* s, const char* family, const char* param, const char* tier,
                   char** json_out) {
  return guarded([&] {
    if (!s || !json_out) atlas::fail(atlas::ErrorCode::InvalidArgument, "null argument");
    auto fam = atlas::parse_family(need(family, "family"));
    auto v = atlas::parse_complex(need(param, "param"));
    auto t = tier ? atlas::parse_tier(tier) : atlas::Tier::Standard;
    *json_out = dup(atlas::records::classification(fam, v, t).dump());
  });
}

int atlas_analyze(atlas_session* s, const char* request_json, char** json_out) {
  return guarded([&] {
    if (!s || !json_out) atlas::fail(atlas::ErrorCode::InvalidArgument, "null argument");
    auto req = atlas::records::json::parse(need(request_json, "request"), nullptr, false);
    if (req.is_discarded()) atlas::fail(atlas::ErrorCode::InvalidArgument, "request is not JSON");
    *json_out = dup(atlas::records::run_analysis(req).dump());
  });
}

int atlas_render(atlas_session* s, const char* family, const char* plane, const char* anchor,
                 const char* center, double scale, int width, int height, const char* tier,
                 const char* png_path, const char* meta_path) {
  return guarded([&] {
    if (!s) atlas::fail(atlas::ErrorCode::InvalidArgument, "null session");
    auto fam = atlas::parse_family(need(family, "family"));
    auto pl = atlas::parse_plane(need(plane, "plane"));
    atlas::Viewport view{atlas::parse_complex(need(center, "center")), scale, width, height};
    view.validate();
    atlas::RenderOptions opt;
    opt.tier = tier ? atlas::parse_tier(tier) : atlas::Tier::Standard;
    opt.threads = s->cfg.render_threads;
    atlas::Raster r;
    if (pl == atlas::Plane::Parameter) {
      if (anchor) atlas::fail(atlas::ErrorCode::InvalidArgument, "anchor is only for dyn renders");
      r = atlas::render_parameter(fam, view, opt);
    } else {
      auto p = atlas::Parameter::make(fam, atlas::parse_complex(need(anchor, "anchor")));
      r = atlas::render_dynamical(p, view, opt);
    }
    if (png_path) atlas::write_file_atomic(png_path, atlas::encode_png(r));
    if (meta_path) atlas::write_file_atomic(meta_path, atlas::raster_meta_json(r));
  });
}

int atlas_render_tile(atlas_session* s, const char* family, const char* plane,
                      const char* anchor, int zoom, long long x, long long y, const char* tier,
                      char** png_out, long* len_out, char** etag_out) {
  return guarded([&] {
    if (!s || !png_out || !len_out) atlas::fail(atlas::ErrorCode::InvalidArgument, "null argument");
    atlas::TileKey key;
    key.family = atlas::parse_family(need(family, "family"));
    key.plane = atlas::parse_plane(need(plane, "plane"));
    if (key.plane == atlas::Plane::Dynamical)
      key.anchor = atlas::parse_complex(need(anchor, "anchor"));
    if (zoom > s->cfg.world.max_zoom)
      atlas::fail(atlas::ErrorCode::InvalidArgument, "zoom exceeds the configured maximum");
    key.zoom = zoom;
    key.x = x;
    key.y = y;
    key.tier = tier ? atlas::parse_tier(tier) : atlas::Tier::Standard;
    std::string png = atlas::encode_png(atlas::render_tile(key, s->cfg.world, s->cfg.render_threads));
    char* buf = static_cast<char*>(std::malloc(png.size()));
    if (!buf) atlas::fail(atlas::ErrorCode::Internal, "out of memory");
    std::memcpy(buf, png.data(), png.size());
    *png_out = buf;
    *len_out = long(png.size());
    if (etag_out) *etag_out = dup(atlas::tile_etag(key, s->cfg.world));
  });
}

int atlas_figure(atlas_session* s, const char* id, const char* outdir, char** json_out) {
  return guarded([&] {
    if (!s) atlas::fail(atlas::ErrorCode::InvalidArgument, "null session");
    std::string dir = need(outdir, "outdir");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) atlas::fail(atlas::ErrorCode::Io, "cannot create " + dir + ": " + ec.message());
    auto paths = atlas::render_figure(need(id, "id"), dir, s->cfg.render_threads);
    if (json_out) *json_out = dup(atlas::records::json(paths).dump());
  });
}

int atlas_figure_ids(char** out) {
  return guarded([&] {
    if (!out) atlas::fail(atlas::ErrorCode::InvalidArgument, "null out pointer");
    std::string s;
    for (const auto& id : atlas::figure_ids()) s += id + "\n";
    *out = dup(s);
  });
}

int atlas_serve(atlas_session* s, const char* host, int port) {
  return guarded([&] {
    if (!s) atlas::fail(atlas::ErrorCode::InvalidArgument, "null session");
    atlas::Service svc(s->cfg);
    svc.serve(host ? host : "127.0.0.1", port);
  });
}

}  // extern "C"
