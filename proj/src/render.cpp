#include "atlas/render.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <png.h>
#include <zlib.h>

#include "immediacy.hpp"
#include "json.hpp"

namespace atlas {

namespace fs = std::filesystem;
using nlohmann::json;

// ------------------------------------------------------------------ geometry

void Viewport::validate() const {
  if (!(scale > 0) || !std::isfinite(scale))
    fail(ErrorCode::InvalidArgument, "viewport scale must be positive");
  if (width < 1 || height < 1 || width > 4096 || height > 4096)
    fail(ErrorCode::InvalidArgument, "viewport size must lie in [1, 4096]");
  if (!std::isfinite(center.real()) || !std::isfinite(center.imag()))
    fail(ErrorCode::NonFiniteParameter, "viewport centre is not finite");
}

cplx Viewport::to_plane(double px, double py) const {
  return {center.real() + (px - 0.5 * width) * scale,
          center.imag() - (py - 0.5 * height) * scale};
}

void Viewport::to_pixel(cplx z, double& px, double& py) const {
  px = (z.real() - center.real()) / scale + 0.5 * width;
  py = -(z.imag() - center.imag()) / scale + 0.5 * height;
}

const char* plane_name(Plane p) { return p == Plane::Parameter ? "param" : "dyn"; }

Plane parse_plane(const std::string& s) {
  if (s == "param") return Plane::Parameter;
  if (s == "dyn") return Plane::Dynamical;
  fail(ErrorCode::InvalidArgument, "unknown plane '" + s + "'");
}

namespace {

std::string hex_digest(const std::string& s) {
  auto data = reinterpret_cast<const Bytef*>(s.data());
  uLong h1 = crc32(0L, data, uInt(s.size()));
  uLong h2 = crc32(h1 ^ 0x5bd1e995UL, data, uInt(s.size()));
  char buf[20];
  std::snprintf(buf, sizeof buf, "%08lx%08lx", h1 & 0xffffffffUL, h2 & 0xffffffffUL);
  return buf;
}

}  // namespace

std::string WorldConfig::hash() const {
  std::string s = format_complex(newton_center) + "|" + format_double(newton_half) + "|" +
                  format_complex(antipodal_center) + "|" + format_double(antipodal_half) +
                  "|" + format_complex(dynamical_center) + "|" +
                  format_double(dynamical_half) + "|" + std::to_string(max_zoom);
  return hex_digest(s);
}

std::string TileKey::canonical() const {
  std::string s = std::string(family_name(family)) + "/" + plane_name(plane) + "/" +
                  std::to_string(zoom) + "/" + std::to_string(x) + "/" + std::to_string(y) +
                  "/" + tier_name(tier);
  if (plane == Plane::Dynamical) s += "/" + format_complex(anchor);
  return s;
}

Viewport tile_viewport(const TileKey& key, const WorldConfig& world) {
  if (key.zoom < 0 || key.zoom > 62) fail(ErrorCode::InvalidArgument, "zoom out of range");
  cplx c;
  double half;
  if (key.plane == Plane::Dynamical) {
    c = world.dynamical_center;
    half = world.dynamical_half;
  } else if (key.family == Family::Newton) {
    c = world.newton_center;
    half = world.newton_half;
  } else {
    c = world.antipodal_center;
    half = world.antipodal_half;
  }
  double n = std::ldexp(1.0, key.zoom);
  if (key.x < 0 || key.y < 0 || double(key.x) >= n || double(key.y) >= n)
    fail(ErrorCode::OutOfWorld, "tile outside the world square");
  double w = 2 * half / n;
  Viewport v;
  v.center = {c.real() - half + (double(key.x) + 0.5) * w,
              c.imag() + half - (double(key.y) + 0.5) * w};
  v.scale = w / kTileSize;
  v.width = v.height = kTileSize;
  return v;
}

// ------------------------------------------------------------------ palette

std::string pixel_class_name(Family fam, const PixelClass& c) {
  auto tname = [&](int idx) -> std::string {
    if (fam == Family::Newton) {
      static const char* n[] = {"1", "-1", "a", "conj(a)"};
      return idx >= 0 && idx < 4 ? n[idx] : "?";
    }
    return idx == 0 ? "0" : "inf";
  };
  switch (c.kind) {
    case PixelKind::OutsideDomain: return "OutsideDomain";
    case PixelKind::Undecided: return "Undecided";
    case PixelKind::Principal: return "Principal(" + tname(c.sub) + ")";
    case PixelKind::Capture: return "Capture(" + tname(c.sub) + ")";
    case PixelKind::Mandelbrot: return "Mandelbrot";
    case PixelKind::Tricorn: return "Tricorn";
    case PixelKind::Basin: return "Basin(" + tname(c.sub) + ")";
    case PixelKind::CycleSlot: return "CycleSlot(" + std::to_string(c.sub) + ")";
    case PixelKind::Julia: return "Julia";
  }
  return "?";
}

void pixel_color(Family fam, const PixelClass& c, uint8_t rgba[4]) {
  auto set = [&](int r, int g, int b) {
    rgba[0] = uint8_t(r);
    rgba[1] = uint8_t(g);
    rgba[2] = uint8_t(b);
    rgba[3] = 255;
  };
  // period shading: eight steps, darker with longer periods
  auto shaded = [&](int r, int g, int b) {
    int step = c.period > 0 ? (c.period - 1) % 8 : 0;
    int f = 256 - 20 * step;
    set(r * f / 256, g * f / 256, b * f / 256);
  };
  bool nw = fam == Family::Newton;
  switch (c.kind) {
    case PixelKind::OutsideDomain: set(96, 96, 96); break;
    case PixelKind::Undecided: set(12, 12, 12); break;
    case PixelKind::Principal:
      if (nw && c.sub == 1) set(235, 130, 40);
      else set(205, 45, 45);
      break;
    case PixelKind::Capture: {
      static const int cap[4][3] = {{120, 165, 235}, {70, 105, 205}, {135, 215, 205}, {80, 165, 150}};
      int k = std::min<int>(c.sub, 3);
      set(cap[k][0], cap[k][1], cap[k][2]);
      break;
    }
    case PixelKind::Mandelbrot: shaded(240, 215, 60); break;
    case PixelKind::Tricorn: shaded(60, 185, 85); break;
    case PixelKind::Basin: {
      static const int bas[4][3] = {{220, 70, 70}, {70, 110, 220}, {70, 190, 110}, {230, 200, 70}};
      int k = std::min<int>(c.sub, 3);
      set(bas[k][0], bas[k][1], bas[k][2]);
      break;
    }
    case PixelKind::CycleSlot: {
      static const int cyc[6][3] = {{170, 90, 200}, {230, 150, 210}, {120, 60, 160},
                                    {200, 170, 240}, {150, 100, 120}, {100, 80, 200}};
      int k = c.sub % 6;
      set(cyc[k][0], cyc[k][1], cyc[k][2]);
      break;
    }
    case PixelKind::Julia: set(15, 15, 15); break;
  }
}

PixelClass parameter_pixel_class(const Parameter& p, const Classification& c) {
  PixelClass out;
  if (p.family == Family::Newton && !p.in_u) {
    out.kind = PixelKind::OutsideDomain;
    return out;
  }
  switch (c.component) {
    case ComponentKind::Principal:
      out.kind = PixelKind::Principal;
      out.sub = uint8_t(std::max(0, target_index(p.family, c.target)));
      break;
    case ComponentKind::Capture:
      out.kind = PixelKind::Capture;
      out.sub = uint8_t(std::max(0, target_index(p.family, c.target)));
      break;
    case ComponentKind::Mandelbrot:
      out.kind = PixelKind::Mandelbrot;
      out.period = uint16_t(c.component_period);
      break;
    case ComponentKind::Tricorn:
      out.kind = PixelKind::Tricorn;
      out.period = uint16_t(c.component_period);
      break;
    case ComponentKind::Unknown:
      out.kind = PixelKind::Undecided;
      break;
  }
  return out;
}

// ------------------------------------------------------------------ rendering

namespace {

Tier next_tier(Tier t) { return t == Tier::Preview ? Tier::Standard : Tier::Analysis; }

template <class PixelFn>
void for_each_row(int height, int threads, PixelFn&& row) {
  int nt = threads > 0 ? threads : int(std::max(1u, std::thread::hardware_concurrency()));
  nt = std::min(nt, height);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int j; (j = next.fetch_add(1)) < height;) row(j);
  };
  if (nt <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
}

void finish(Raster& r) {
  size_t n = r.cls.size();
  r.rgba.assign(n * 4, 0);
  for (size_t k = 0; k < n; ++k) {
    const auto& c = r.cls[k];
    pixel_color(r.family, c, &r.rgba[4 * k]);
    r.histogram[pixel_class_name(r.family, c)]++;
    r.max_period = std::max<int>(r.max_period, c.period);
  }
}

struct CycleRef {
  std::vector<cplx> points;
  int base = 0;  // first slot index
};

PixelClass dynamical_pixel(const Map& f, Family fam, cplx z, long budget,
                           const std::vector<CycleRef>& cycles) {
  PixelClass out;
  out.kind = PixelKind::Julia;
  auto targets = fam == Family::Newton
                     ? std::vector<cplx>{1.0, -1.0, f.par, std::conj(f.par)}
                     : std::vector<cplx>{0.0};
  constexpr double eps = 1e-6;
  for (long k = 0; k <= budget; ++k) {
    double r = std::abs(z);
    if (!std::isfinite(r) || r > 1e8) {
      if (fam == Family::Antipodal) {
        out.kind = PixelKind::Basin;
        out.sub = 1;
      }
      return out;
    }
    if (fam == Family::Antipodal && r > 1.0 / eps) {
      out.kind = PixelKind::Basin;
      out.sub = 1;
      return out;
    }
    for (size_t t = 0; t < targets.size(); ++t)
      if (std::abs(z - targets[t]) < eps) {
        out.kind = PixelKind::Basin;
        out.sub = uint8_t(t);
        return out;
      }
    for (const auto& cy : cycles) {
      int P = int(cy.points.size());
      for (int m = 0; m < P; ++m)
        if (std::abs(z - cy.points[m]) < eps * std::max(1.0, std::abs(cy.points[m]))) {
          int slot = int(((m - k) % P + P) % P);
          out.kind = PixelKind::CycleSlot;
          out.sub = uint8_t(std::min(255, cy.base + slot));
          out.period = uint16_t(P);
          return out;
        }
    }
    z = f(z);
  }
  return out;
}

}  // namespace

Raster render_parameter(Family fam, const Viewport& view, const RenderOptions& opt) {
  view.validate();
  Raster r;
  r.family = fam;
  r.plane = Plane::Parameter;
  r.view = view;
  r.tier = opt.tier;
  r.cls.resize(size_t(view.width) * view.height);
  long budget = tier_budget(opt.tier);
  for_each_row(view.height, opt.threads, [&](int j) {
    for (int i = 0; i < view.width; ++i) {
      auto p = Parameter::make(fam, view.to_plane(i + 0.5, j + 0.5));
      PixelClass pc;
      if (fam == Family::Newton && !p.in_u) {
        pc.kind = PixelKind::OutsideDomain;
      } else {
        auto c = classify(p, budget);
        if (opt.escalate && !c.decided() && opt.tier != Tier::Analysis)
          c = classify(p, tier_budget(next_tier(opt.tier)));
        pc = parameter_pixel_class(p, c);
      }
      r.cls[size_t(j) * view.width + i] = pc;
    }
  });
  finish(r);
  return r;
}

Raster render_dynamical(const Parameter& anchor, const Viewport& view,
                        const RenderOptions& opt) {
  view.validate();
  if (anchor.family == Family::Newton && !anchor.in_u)
    fail(ErrorCode::OutsideDomain, "anchor parameter lies outside the Newton domain");
  Raster r;
  r.family = anchor.family;
  r.plane = Plane::Dynamical;
  r.anchor = anchor.value;
  r.view = view;
  r.tier = opt.tier;
  r.cls.resize(size_t(view.width) * view.height);
  Map f(anchor);
  std::vector<CycleRef> cycles;
  auto c = classify(anchor, tier_budget(Tier::Analysis));
  if (c.kind == VerdictKind::AttractingCycle && !c.cycle.points.empty()) {
    cycles.push_back({c.cycle.points, 0});
    if (!c.cycle.self_symmetric) {
      std::vector<cplx> mirror;
      for (cplx z : c.cycle.points) mirror.push_back(f.inv(z));
      cycles.push_back({mirror, int(c.cycle.points.size())});
    }
  }
  long budget = tier_budget(opt.tier);
  for_each_row(view.height, opt.threads, [&](int j) {
    for (int i = 0; i < view.width; ++i) {
      cplx z = view.to_plane(i + 0.5, j + 0.5);
      r.cls[size_t(j) * view.width + i] = dynamical_pixel(f, anchor.family, z, budget, cycles);
    }
  });
  finish(r);
  return r;
}

Raster render_tile(const TileKey& key, const WorldConfig& world, int threads) {
  auto view = tile_viewport(key, world);
  RenderOptions opt;
  opt.tier = key.tier;
  opt.threads = threads;
  opt.escalate = key.zoom >= kEscalateZoom;
  if (key.plane == Plane::Parameter) return render_parameter(key.family, view, opt);
  return render_dynamical(Parameter::make(key.family, key.anchor), view, opt);
}

// ------------------------------------------------------------------ output

std::string encode_png(const Raster& r) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(ErrorCode::Io, "png writer unavailable");
  png_infop info = png_create_info_struct(png);
  std::string out;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::Io, "png encoding failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t len) {
        static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<char*>(data), len);
      },
      nullptr);
  png_set_IHDR(png, info, png_uint_32(r.view.width), png_uint_32(r.view.height), 8,
               PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
  png_write_info(png, info);
  for (int j = 0; j < r.view.height; ++j)
    png_write_row(png, const_cast<png_bytep>(&r.rgba[size_t(j) * r.view.width * 4]));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

std::string raster_meta_json(const Raster& r) {
  json j;
  j["family"] = family_name(r.family);
  j["plane"] = plane_name(r.plane);
  if (r.plane == Plane::Dynamical) j["anchor"] = format_complex(r.anchor);
  j["viewport"] = {{"center", format_complex(r.view.center)},
                   {"scale", r.view.scale},
                   {"width", r.view.width},
                   {"height", r.view.height}};
  j["tier"] = tier_name(r.tier);
  j["palette_version"] = kPaletteVersion;
  json h = json::object();
  for (const auto& [k, v] : r.histogram) h[k] = v;
  j["class_histogram"] = h;
  j["max_period"] = r.max_period;
  return j.dump(2) + "\n";
}

void draw_marker(Raster& r, cplx z, int radius, const uint8_t rgba[4]) {
  double px, py;
  r.view.to_pixel(z, px, py);
  int ci = int(std::floor(px)), cj = int(std::floor(py));
  for (int dj = -radius; dj <= radius; ++dj)
    for (int di = -radius; di <= radius; ++di) {
      if (std::max(std::abs(di), std::abs(dj)) != radius && radius > 1) continue;
      int i = ci + di, j = cj + dj;
      if (i < 0 || j < 0 || i >= r.view.width || j >= r.view.height) continue;
      std::copy(rgba, rgba + 4, &r.rgba[(size_t(j) * r.view.width + i) * 4]);
    }
}

void draw_polyline(Raster& r, const std::vector<cplx>& pts, const uint8_t rgba[4]) {
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    double x0, y0, x1, y1;
    r.view.to_pixel(pts[k], x0, y0);
    r.view.to_pixel(pts[k + 1], x1, y1);
    double len = std::hypot(x1 - x0, y1 - y0);
    if (!std::isfinite(len) || len > 1e5) continue;
    int n = std::max(1, int(std::ceil(2 * len)));
    for (int s = 0; s <= n; ++s) {
      double t = double(s) / n;
      int i = int(std::floor(x0 + t * (x1 - x0))), j = int(std::floor(y0 + t * (y1 - y0)));
      if (i < 0 || j < 0 || i >= r.view.width || j >= r.view.height) continue;
      std::copy(rgba, rgba + 4, &r.rgba[(size_t(j) * r.view.width + i) * 4]);
    }
  }
}

// ------------------------------------------------------------------ cache

void write_file_atomic(const std::string& path, const std::string& bytes) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  static std::atomic<unsigned> counter{0};
  fs::path tmp = p;
  tmp += ".tmp" + std::to_string(counter.fetch_add(1)) + "-" +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) fail(ErrorCode::Io, "cannot write " + tmp.string());
    o.write(bytes.data(), std::streamsize(bytes.size()));
    if (!o) fail(ErrorCode::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::Io, "cannot move " + tmp.string() + " into place");
  }
}

TileCache::TileCache(std::string dir) : dir_(std::move(dir)) {}

std::string TileCache::path_for(const std::string& key) const {
  return (fs::path(dir_) / (hex_digest(key) + ".png")).string();
}

std::optional<std::string> TileCache::load(const std::string& key) const {
  if (dir_.empty()) return std::nullopt;
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void TileCache::store(const std::string& key, const std::string& bytes) const {
  if (dir_.empty()) return;
  write_file_atomic(path_for(key), bytes);
}

std::string tile_etag(const TileKey& key, const WorldConfig& world) {
  return "\"" + hex_digest(key.canonical() + "|" + kPaletteVersion + "|" + world.hash()) + "\"";
}

}  // namespace atlas
