#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atlas/orbit.hpp"

namespace atlas {

inline constexpr const char* kPaletteVersion = "atlas-palette-1";
inline constexpr int kTileSize = 256;

struct Viewport {
  cplx center;
  double scale = 0.0;  // plane units per pixel
  int width = 0, height = 0;

  void validate() const;
  cplx to_plane(double px, double py) const;  // pixel centre at (i+0.5, j+0.5)
  void to_pixel(cplx z, double& px, double& py) const;
};

enum class Plane { Parameter, Dynamical };
const char* plane_name(Plane p);  // "param" / "dyn"
Plane parse_plane(const std::string& s);

struct WorldConfig {
  cplx newton_center{0.0, 2.0};
  double newton_half = 4.0;
  cplx antipodal_center{0.0, 0.0};
  double antipodal_half = 4.0;
  cplx dynamical_center{0.0, 0.0};
  double dynamical_half = 4.0;
  int max_zoom = 40;

  std::string hash() const;
};

struct TileKey {
  Family family = Family::Newton;
  Plane plane = Plane::Parameter;
  cplx anchor;  // dynamical plane only
  int zoom = 0;
  int64_t x = 0, y = 0;
  Tier tier = Tier::Standard;

  std::string canonical() const;
};

Viewport tile_viewport(const TileKey& key, const WorldConfig& world);

// Per-pixel class. kind selects the colour family; sub is a target index or a
// cycle slot; period modulates the shade.
enum class PixelKind : uint8_t {
  OutsideDomain,
  Undecided,
  Principal,
  Capture,
  Mandelbrot,
  Tricorn,
  Basin,      // dynamical plane: fixed target
  CycleSlot,  // dynamical plane: basin of one point of an attracting cycle
  Julia,      // dynamical plane: no decision within budget
};

struct PixelClass {
  PixelKind kind = PixelKind::Undecided;
  uint8_t sub = 0;
  uint16_t period = 0;
  bool operator==(const PixelClass&) const = default;
};

std::string pixel_class_name(Family fam, const PixelClass& c);
void pixel_color(Family fam, const PixelClass& c, uint8_t rgba[4]);
PixelClass parameter_pixel_class(const Parameter& p, const Classification& c);

struct Raster {
  Family family = Family::Newton;
  Plane plane = Plane::Parameter;
  cplx anchor;
  Viewport view;
  Tier tier = Tier::Standard;
  std::vector<PixelClass> cls;
  std::vector<uint8_t> rgba;
  std::map<std::string, long> histogram;
  int max_period = 0;

  const PixelClass& at(int i, int j) const { return cls[size_t(j) * view.width + i]; }
};

struct RenderOptions {
  Tier tier = Tier::Standard;
  int threads = 0;          // 0: hardware concurrency
  bool escalate = false;    // retry undecided pixels one tier up
};

Raster render_parameter(Family fam, const Viewport& view, const RenderOptions& opt);
Raster render_dynamical(const Parameter& anchor, const Viewport& view,
                        const RenderOptions& opt);

// Tiles: zoom escalation kicks in from kEscalateZoom on.
inline constexpr int kEscalateZoom = 12;
Raster render_tile(const TileKey& key, const WorldConfig& world, int threads = 0);

// Deterministic RGBA8 PNG.
std::string encode_png(const Raster& r);
std::string raster_meta_json(const Raster& r);

// Overlays drawn into the RGBA buffer only; classes are untouched.
void draw_polyline(Raster& r, const std::vector<cplx>& pts, const uint8_t rgba[4]);
void draw_marker(Raster& r, cplx z, int radius, const uint8_t rgba[4]);

// File cache with atomic writes (temp file then rename).
class TileCache {
 public:
  explicit TileCache(std::string dir);
  std::optional<std::string> load(const std::string& key) const;
  void store(const std::string& key, const std::string& bytes) const;
  const std::string& dir() const { return dir_; }

 private:
  std::string path_for(const std::string& key) const;
  std::string dir_;
};

// Strong validator for a tile body.
std::string tile_etag(const TileKey& key, const WorldConfig& world);

std::vector<std::string> figure_ids();
// Writes <id>.png and <id>.meta.json under outdir; returns the paths.
std::vector<std::string> render_figure(const std::string& id, const std::string& outdir,
                                       int threads = 0);

void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace atlas
