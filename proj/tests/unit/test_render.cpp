#include <png.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "atlas/orbit.hpp"
#include "atlas/render.hpp"
#include "common.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace atlas;
using testing_support::kA2;

namespace {

// decode with libpng's simplified API
std::vector<uint8_t> decode_rgba(const std::string& bytes, int& w, int& h) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  REQUIRE(png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()));
  img.format = PNG_FORMAT_RGBA;
  std::vector<uint8_t> buf(PNG_IMAGE_SIZE(img));
  REQUIRE(png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr));
  w = int(img.width);
  h = int(img.height);
  return buf;
}

std::string temp_dir(const char* tag) {
  auto p = std::filesystem::temp_directory_path() /
           (std::string("atlas-test-") + tag + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace

TEST_SUITE("render") {
  TEST_CASE("viewport pixel/plane round trip") {
    Viewport v{{0.3, 2.0}, 1e-3, 300, 200};
    for (double px : {0.5, 17.25, 299.5})
      for (double py : {0.5, 88.0, 199.5}) {
        double qx, qy;
        v.to_pixel(v.to_plane(px, py), qx, qy);
        CHECK(std::abs(qx - px) < 1e-6);
        CHECK(std::abs(qy - py) < 1e-6);
      }
    // y grows downwards
    CHECK(v.to_plane(0, 0).imag() > v.to_plane(0, 199).imag());
    CHECK_THROWS_AS((Viewport{{0, 0}, 0.0, 10, 10}.validate()), Error);
    CHECK_THROWS_AS((Viewport{{0, 0}, 1.0, 0, 10}.validate()), Error);
  }

  TEST_CASE("tiles are byte-identical across thread counts and runs") {
    WorldConfig w;
    TileKey key;
    key.zoom = 3;
    key.x = 4;
    key.y = 2;
    std::string ref = encode_png(render_tile(key, w, 1));
    for (int th : {1, 2, 3, 0}) CHECK(encode_png(render_tile(key, w, th)) == ref);
    key.plane = Plane::Dynamical;
    key.anchor = kA2;
    key.zoom = 1;
    key.x = key.y = 0;
    std::string dyn = encode_png(render_tile(key, w, 1));
    CHECK(encode_png(render_tile(key, w, 3)) == dyn);
  }

  TEST_CASE("PNG decodes to the raster's RGBA buffer") {
    Viewport v{kA2, 0.002, 40, 30};
    auto r = render_parameter(Family::Newton, v, {});
    int w = 0, h = 0;
    auto px = decode_rgba(encode_png(r), w, h);
    CHECK(w == 40);
    CHECK(h == 30);
    CHECK(px == r.rgba);
  }

  TEST_CASE("tile straddling the domain boundary agrees with the inequality") {
    WorldConfig world;
    // zoom 3 tile containing 2 + i sqrt(3), a point of the boundary hyperbola
    TileKey key;
    key.zoom = 3;
    double n = 8, half = world.newton_half;
    cplx c = world.newton_center;
    key.x = int64_t((2.0 - (c.real() - half)) / (2 * half / n));
    key.y = int64_t(((c.imag() + half) - std::sqrt(3.0)) / (2 * half / n));
    auto r = render_tile(key, world);
    long agree = 0, outside = 0, total = long(r.cls.size());
    for (int j = 0; j < r.view.height; ++j)
      for (int i = 0; i < r.view.width; ++i) {
        cplx a = r.view.to_plane(i + 0.5, j + 0.5);
        bool analytic = 2 * a.imag() * a.imag() - a.real() * a.real() - 2 <= 0;
        bool rendered = r.at(i, j).kind == PixelKind::OutsideDomain;
        agree += analytic == rendered;
        outside += rendered;
      }
    CHECK(outside > total / 20);
    CHECK(outside < total - total / 20);
    CHECK(double(agree) / double(total) >= 0.99);
  }

  TEST_CASE("the pixel containing the period-4 center is Tricorn(4)") {
    WorldConfig world;
    TileKey key;
    key.zoom = 4;
    double n = 16, half = world.newton_half;
    cplx c = world.newton_center;
    double fx = (kA2.real() - (c.real() - half)) / (2 * half / n);
    double fy = ((c.imag() + half) - kA2.imag()) / (2 * half / n);
    key.x = int64_t(fx);
    key.y = int64_t(fy);
    auto r = render_tile(key, world);
    double px, py;
    r.view.to_pixel(kA2, px, py);
    const auto& pc = r.at(int(px), int(py));
    CHECK(pc.kind == PixelKind::Tricorn);
    CHECK(pc.period == 4);
    CHECK(pixel_class_name(Family::Newton, pc) == "Tricorn");
  }

  TEST_CASE("mirrored Newton tiles have matching class histograms") {
    WorldConfig world;
    for (auto [x, y] : {std::pair<int64_t, int64_t>{0, 1}, {1, 0}, {1, 1}}) {
      TileKey k1, k2;
      k1.zoom = k2.zoom = 2;
      k1.tier = k2.tier = Tier::Preview;
      k1.x = x;
      k2.x = 3 - x;
      k1.y = k2.y = y;
      auto r1 = render_tile(k1, world), r2 = render_tile(k2, world);
      // a -> -conj(a) swaps the basins of 1 and -1
      auto swapped = [](const Raster& r) {
        std::map<std::string, long> h;
        for (const auto& pc : r.cls) {
          PixelClass q = pc;
          if ((q.kind == PixelKind::Principal || q.kind == PixelKind::Capture) && q.sub < 2)
            q.sub = uint8_t(1 - q.sub);
          if ((q.kind == PixelKind::Principal || q.kind == PixelKind::Capture) && q.sub >= 2)
            q.sub = uint8_t(5 - q.sub);
          ++h[pixel_class_name(Family::Newton, q)];
        }
        return h;
      };
      auto h2 = swapped(r2);
      double n = double(r1.cls.size());
      for (const auto& [name, count] : r1.histogram) {
        double diff = std::abs(double(count) - double(h2[name])) / n;
        CHECK_MESSAGE(diff <= 0.01, name);
      }
    }
  }

  TEST_CASE("dynamical plane of the period-4 center") {
    Viewport v{{0, 0}, 8.0 / 64, 64, 64};
    auto r = render_dynamical(Parameter::newton(kA2), v, {});
    bool slots = false;
    for (const auto& pc : r.cls) slots = slots || pc.kind == PixelKind::CycleSlot;
    CHECK(slots);
    double px, py;
    v.to_pixel({1.0, 0.0}, px, py);
    CHECK(r.at(int(px), int(py)).kind == PixelKind::Basin);
    CHECK_THROWS_AS(render_dynamical(Parameter::newton({2, 0}), v, {}), Error);
  }

  TEST_CASE("tile addressing errors") {
    WorldConfig w;
    TileKey k;
    k.zoom = 2;
    k.x = 4;
    CHECK_THROWS_AS(tile_viewport(k, w), Error);
    k.x = -1;
    CHECK_THROWS_AS(tile_viewport(k, w), Error);
    k.x = 0;
    k.zoom = 63;
    CHECK_THROWS_AS(tile_viewport(k, w), Error);
    k.zoom = 40;
    k.x = k.y = (int64_t(1) << 40) - 1;
    auto v = tile_viewport(k, w);
    CHECK(v.scale > 0);
  }

  TEST_CASE("validators depend on key, palette and world") {
    WorldConfig w;
    TileKey a, b;
    b.x = 0;
    b.tier = Tier::Analysis;
    CHECK(tile_etag(a, w) == tile_etag(a, w));
    CHECK(tile_etag(a, w) != tile_etag(b, w));
    WorldConfig w2;
    w2.max_zoom = 20;
    CHECK(tile_etag(a, w) != tile_etag(a, w2));
    CHECK(tile_etag(a, w).front() == '"');
  }

  TEST_CASE("tile cache stores atomically") {
    std::string dir = temp_dir("cache");
    TileCache cache(dir);
    CHECK_FALSE(cache.load("k1").has_value());
    cache.store("k1", std::string("\x89PNG\0abc", 8));
    auto hit = cache.load("k1");
    REQUIRE(hit.has_value());
    CHECK(*hit == std::string("\x89PNG\0abc", 8));
    int files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
      ++files;
      CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
    }
    CHECK(files == 1);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("metadata document") {
    Viewport v{kA2, 0.01, 16, 16};
    auto r = render_parameter(Family::Newton, v, {});
    auto doc = nlohmann::json::parse(raster_meta_json(r));
    for (const char* k : {"family", "viewport", "palette_version", "class_histogram", "max_period"})
      CHECK(doc.contains(k));
    CHECK(doc["palette_version"] == kPaletteVersion);
    long sum = 0;
    for (auto& [k, n] : doc["class_histogram"].items()) sum += n.get<long>();
    CHECK(sum == 256);
    CHECK(doc["max_period"].get<int>() >= 4);
  }

  TEST_CASE("figures") {
    std::string dir = temp_dir("fig");
    auto paths = render_figure("fig-invisible-zoom", dir, 0);
    REQUIRE(paths.size() == 2);
    CHECK(std::filesystem::exists(paths[0]));
    auto doc = nlohmann::json::parse(std::ifstream(paths[1]));
    CHECK(doc["figure"] == "fig-invisible-zoom");
    CHECK(doc["overlays"].size() == 3);
    CHECK_THROWS_AS(render_figure("fig-nope", dir, 0), Error);
    std::filesystem::remove_all(dir);
  }
}
