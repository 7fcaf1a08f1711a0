#pragma once

#include <optional>
#include <vector>

#include "atlas/parabolic.hpp"

namespace atlas {

enum class PointTag { Root, CoRoot };
const char* tag_name(PointTag t);

struct BoundaryTriple {
  std::vector<cplx> points;  // exactly 3
  std::vector<PointTag> tags;
  std::optional<int> symmetric_index;
  int period = 0;              // 2n
  cplx component_center;       // cycle point fixed by the half-return
  double max_residual = 0.0;   // max |sigma(p) - p|
};

BoundaryTriple half_return_boundary_points(const Parameter& p);

enum class VisibilityState { Visible, Invisible, Undecided };
const char* visibility_name(VisibilityState s);

struct VisibilityVerdict {
  VisibilityState state = VisibilityState::Undecided;
  Target witness = Target::One;  // Visible only
  double finest_radius = 0.0;
  std::vector<double> radii;
  // presence of each witness basin per radius, one row per candidate
  std::vector<Target> candidates;
  std::vector<std::vector<bool>> presence;
};

VisibilityVerdict coroot_visibility(const Parameter& p, cplx point,
                                    double floor = 1e-6);

// Basin classes of the cylinder raster. Fixed targets use target_index;
// the parabolic basin and undecided points get their own codes.
inline constexpr int kClassParabolic = 10;
inline constexpr int kClassUndecided = -1;

struct CylinderRaster {
  int nx = 0, ny = 0;
  double h_max = 0.0;
  std::vector<signed char> cls;  // row-major, row 0 at y = -h_max
  double u_h = 0.0, l_h = 0.0;
  Family family = Family::Newton;

  signed char at(int i, int j) const { return cls[size_t(j) * size_t(nx) + size_t(i)]; }
  double x_of(int i) const { return (i + 0.5) / nx; }
  double y_of(int j) const { return -h_max + (j + 0.5) * (2 * h_max / ny); }
  // fraction of cells violating (x, y) -> (x + 1/2, -y) with relabelling
  double glide_mismatch() const;
  std::vector<double> class_fractions() const;  // index: class + 1
};

// resolution: cells per unit of the cylinder circumference
CylinderRaster cylinder_projection(const ParabolicDatum& d, int resolution,
                                   double h_max);

// Height intervals whose rows lie entirely in one fixed-target basin.
struct HeightBand {
  double lo = 0.0, hi = 0.0;
  int cls = kClassUndecided;
};
std::vector<HeightBand> full_basin_bands(const CylinderRaster& r);

struct ScanHit {
  cplx param;
  int period = 0;
};

struct ScanReport {
  std::vector<cplx> arc_segment;
  bool principal_contact = false;
  int capture_hits = 0;
  std::vector<cplx> capture_samples;
  std::vector<ScanHit> tricorn_hits;
  std::vector<ScanHit> mandelbrot_hits;
  double h1 = 0.0, h2 = 0.0;
  int classified = 0;
};

struct ScanOptions {
  int normals_per_sample = 64;
  int offsets = 64;                // geometric, 1e-6 * window .. window
  double contact_fraction = 1e-3;  // principal pixels closer than this*window
  bool refine_centers = true;      // Newton for tricorn centers near samples
};

ScanReport arc_neighborhood_scan(const std::vector<ParabolicDatum>& arc,
                                 double window, const ScanOptions& opt = {});

// Which point of a center's boundary triple continues to the characteristic
// point of an arc datum reached from that center.
int characteristic_index(const ParabolicDatum& d, const Parameter& center,
                         const BoundaryTriple& triple);

// Boundary arcs of the component with the given center, one start datum per
// point of its boundary triple (by characteristic index) where one was found.
struct ComponentArcs {
  BoundaryTriple triple;
  std::vector<std::optional<ParabolicDatum>> arcs;  // size 3
};
ComponentArcs component_arcs(const Parameter& center, int directions = 12);

// Scan of one boundary arc with the height window picked automatically: root
// arcs use the widest full band of the first fixed target, co-root arcs the
// non-bifurcating window of a coarse pre-scan.
struct ArcScan {
  int index = 0;
  PointTag tag = PointTag::CoRoot;
  std::vector<double> heights;
  ScanReport report;
};
ArcScan scan_component_arc(const ComponentArcs& ca, int index, double window = 1e-2,
                           const ScanOptions& opt = {});

}  // namespace atlas
