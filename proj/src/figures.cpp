#include <algorithm>
#include <cmath>
#include <filesystem>

#include "atlas/render.hpp"
#include "atlas/visibility.hpp"
#include "json.hpp"

namespace atlas {

namespace {

using nlohmann::json;

constexpr int kFigureSize = 512;
const uint8_t kWhite[4] = {255, 255, 255, 255};
const uint8_t kCyan[4] = {0, 230, 230, 255};
const uint8_t kMagenta[4] = {255, 0, 200, 255};

struct Figure {
  Raster raster;
  json overlays = json::array();
};

cplx newton_center(int n) {
  auto rep = center_search_newton(n, 1.001, 10.0);
  if (rep.centers.empty()) fail(ErrorCode::NoRootInRange, "no Newton center found");
  return rep.centers.front();
}

// Traced arc polyline ordered by height, plus the reached samples.
std::pair<std::vector<cplx>, std::vector<EcalleSample>> arc_overlay(const ParabolicDatum& d,
                                                                    double h_span) {
  std::vector<double> targets;
  for (double h = -h_span; h <= h_span + 1e-9; h += 1.0) targets.push_back(h);
  auto tr = trace_arc(d, targets);
  auto path = tr.path;
  std::sort(path.begin(), path.end(),
            [](const EcalleSample& a, const EcalleSample& b) { return a.h < b.h; });
  std::vector<cplx> pts;
  for (const auto& s : path) pts.push_back(s.param);
  return {pts, tr.samples};
}

Viewport square(cplx c, double half) {
  return {c, 2 * half / kFigureSize, kFigureSize, kFigureSize};
}

void add_arcs(Figure& fig, const Parameter& center, double h_span) {
  auto ca = component_arcs(center);
  for (size_t k = 0; k < ca.arcs.size(); ++k) {
    if (!ca.arcs[k]) continue;
    auto [pts, ticks] = arc_overlay(*ca.arcs[k], h_span);
    draw_polyline(fig.raster, pts, kWhite);
    json jt = json::array();
    for (const auto& s : ticks) {
      draw_marker(fig.raster, s.param, 2, kCyan);
      jt.push_back({{"param", format_complex(s.param)}, {"h", s.h}});
    }
    fig.overlays.push_back({{"kind", "arc"},
                            {"characteristic_index", int(k)},
                            {"tag", tag_name(ca.triple.tags[k])},
                            {"points", pts.size()},
                            {"height_ticks", jt}});
  }
}

Figure fig_region(int threads) {
  WorldConfig w;
  RenderOptions opt;
  opt.threads = threads;
  Figure fig{render_parameter(Family::Newton, square(w.newton_center, w.newton_half), opt)};
  // both branches of 2 Im^2 = Re^2 + 2
  for (int sgn : {+1, -1}) {
    std::vector<cplx> pts;
    for (int k = 0; k <= 2000; ++k) {
      double x = -w.newton_half + 2 * w.newton_half * k / 2000.0 + w.newton_center.real();
      pts.push_back({x, sgn * std::sqrt((x * x + 2) / 2)});
    }
    draw_polyline(fig.raster, pts, kWhite);
  }
  fig.overlays.push_back({{"kind", "region-hyperbola"}, {"equation", "2*Im(a)^2 = Re(a)^2 + 2"}});
  return fig;
}

Figure fig_newton_overview(int threads) {
  WorldConfig w;
  RenderOptions opt;
  opt.threads = threads;
  Figure fig{render_parameter(Family::Newton, square(w.newton_center, w.newton_half), opt)};
  for (int n : {2, 3}) {
    auto rep = center_search_newton(n, 1.001, 10.0);
    for (cplx c : rep.centers) {
      draw_marker(fig.raster, c, 3, kMagenta);
      fig.overlays.push_back({{"kind", "center"}, {"param", format_complex(c)}, {"period", 2 * n}});
    }
  }
  return fig;
}

Figure fig_tricorn_n2(int threads) {
  cplx a2 = newton_center(2);
  auto center = Parameter::newton(a2);
  // size the view from the arcs themselves
  auto ca = component_arcs(center);
  double half = 0.05;
  for (const auto& d : ca.arcs)
    if (d) half = std::max(half, 1.6 * std::abs(d->param.value - a2));
  RenderOptions opt;
  opt.threads = threads;
  Figure fig{render_parameter(Family::Newton, square(a2, half), opt)};
  add_arcs(fig, center, 4.0);
  draw_marker(fig.raster, a2, 3, kMagenta);
  fig.overlays.push_back({{"kind", "center"}, {"param", format_complex(a2)}, {"period", 4}});
  return fig;
}

Figure fig_invisible_zoom(int threads) {
  cplx a2 = newton_center(2);
  auto p = Parameter::newton(a2);
  auto tri = half_return_boundary_points(p);
  if (!tri.symmetric_index) fail(ErrorCode::Internal, "no symmetric boundary point");
  cplx z = tri.points[size_t(*tri.symmetric_index)];
  RenderOptions opt;
  opt.threads = threads;
  Figure fig{render_dynamical(p, square(z, 0.05), opt)};
  for (size_t k = 0; k < tri.points.size(); ++k) {
    draw_marker(fig.raster, tri.points[k], 3, k == size_t(*tri.symmetric_index) ? kMagenta : kCyan);
    fig.overlays.push_back({{"kind", "boundary-point"},
                            {"point", format_complex(tri.points[k])},
                            {"tag", tag_name(tri.tags[k])}});
  }
  return fig;
}

Figure fig_antipodal_tongue2(int threads) {
  auto rep = center_search_antipodal(1, default_antipodal_seeds());
  if (rep.centers.empty()) fail(ErrorCode::NoRootInRange, "no tongue center found");
  cplx q = rep.centers.front();
  RenderOptions opt;
  opt.threads = threads;
  Figure fig{render_parameter(Family::Antipodal, square(q, 1.0), opt)};
  add_arcs(fig, Parameter::antipodal(q), 4.0);
  draw_marker(fig.raster, q, 3, kMagenta);
  fig.overlays.push_back({{"kind", "center"}, {"param", format_complex(q)}, {"period", 2}});
  return fig;
}

}  // namespace

std::vector<std::string> figure_ids() {
  return {"fig-region", "fig-newton-overview", "fig-tricorn-n2", "fig-invisible-zoom",
          "fig-antipodal-tongue2"};
}

std::vector<std::string> render_figure(const std::string& id, const std::string& outdir,
                                       int threads) {
  Figure fig;
  if (id == "fig-region") fig = fig_region(threads);
  else if (id == "fig-newton-overview") fig = fig_newton_overview(threads);
  else if (id == "fig-tricorn-n2") fig = fig_tricorn_n2(threads);
  else if (id == "fig-invisible-zoom") fig = fig_invisible_zoom(threads);
  else if (id == "fig-antipodal-tongue2") fig = fig_antipodal_tongue2(threads);
  else {
    std::string list;
    for (const auto& f : figure_ids()) list += (list.empty() ? "" : ", ") + f;
    fail(ErrorCode::UnknownFigure, "unknown figure '" + id + "'; valid ids: " + list);
  }
  namespace fs = std::filesystem;
  std::string png = (fs::path(outdir) / (id + ".png")).string();
  std::string meta = (fs::path(outdir) / (id + ".meta.json")).string();
  auto doc = json::parse(raster_meta_json(fig.raster));
  doc["figure"] = id;
  doc["overlays"] = fig.overlays;
  write_file_atomic(png, encode_png(fig.raster));
  write_file_atomic(meta, doc.dump(2) + "\n");
  return {png, meta};
}

}  // namespace atlas
