#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "atlas/atlas.h"

namespace {

atlas_session* g_session = nullptr;

int report_failure() {
  std::fprintf(stderr, "atlas: %s\n", atlas_last_error_message());
  return 2;
}

// out is read after the call has filled it
int emit(int rc, char* const& out) {
  if (rc != 0) return report_failure();
  std::printf("%s\n", out);
  atlas_free_string(out);
  return 0;
}

std::string json_str(const std::string& s) {
  std::string o = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') o += '\\';
    o += c;
  }
  return o + "\"";
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string json_list(const std::vector<double>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s + "]";
}

// Fields shared by the analysis subcommands.
struct Target {
  std::string family = "newton";
  std::string center;
  int arc = -1;

  void add(CLI::App* app, bool with_arc) {
    app->add_option("--family", family, "newton | antipodal")->check(CLI::IsMember({"newton", "antipodal"}));
    app->add_option("--center", center, "component center RE,IM")->required();
    if (with_arc) app->add_option("--arc", arc, "boundary arc index 0..2");
  }
  std::string head(const char* kind) const {
    std::string s = "{\"kind\":" + json_str(kind) + ",\"family\":" + json_str(family) +
                    ",\"center\":" + json_str(center);
    if (arc >= 0) s += ",\"arc\":" + std::to_string(arc);
    return s;
  }
};

int analyze(const std::string& request) {
  char* out = nullptr;
  return emit(atlas_analyze(g_session, request.c_str(), &out), out);
}

bool parse_size(const std::string& s, int& w, int& h) {
  return std::sscanf(s.c_str(), "%dx%d", &w, &h) == 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter-space atlas of antiholomorphic return maps"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0: all cores)");

  // classify
  auto* cl = app.add_subcommand("classify", "classify one parameter");
  std::string cl_family = "newton", cl_param, cl_tier = "standard";
  cl->add_option("--family", cl_family)->check(CLI::IsMember({"newton", "antipodal"}));
  cl->add_option("--param", cl_param, "RE,IM")->required();
  cl->add_option("--tier", cl_tier)->check(CLI::IsMember({"preview", "standard", "analysis"}));

  // trace-arc
  auto* ta = app.add_subcommand("trace-arc", "trace a boundary arc to target heights");
  Target ta_t;
  std::vector<double> ta_targets;
  ta_t.add(ta, true);
  ta->add_option("--targets", ta_targets, "Ecalle heights")->required()->delimiter(',');

  // phase
  auto* ph = app.add_subcommand("phase", "lifted phase approaching an arc point");
  Target ph_t;
  double ph_h = 0.0;
  std::vector<double> ph_dist{1e-3, 1e-4, 1e-5};
  ph_t.add(ph, true);
  ph->add_option("--height", ph_h, "arc height");
  ph->add_option("--distances", ph_dist)->delimiter(',');

  // visibility
  auto* vi = app.add_subcommand("visibility", "boundary triple and co-root visibility");
  Target vi_t;
  double vi_floor = 1e-6;
  vi_t.add(vi, false);
  vi->add_option("--floor", vi_floor, "finest probe radius");

  // scan-arc
  auto* sc = app.add_subcommand("scan-arc", "classify the neighbourhood of a boundary arc");
  Target sc_t;
  double sc_window = 1e-2;
  int sc_normals = -1, sc_offsets = -1;
  sc_t.add(sc, true);
  sc->add_option("--window", sc_window);
  sc->add_option("--normals", sc_normals, "normals per traced sample");
  sc->add_option("--offsets", sc_offsets, "offsets per normal");

  // render-param / render-dyn
  struct RenderArgs {
    std::string family = "newton", center, size = "512x512", tier = "standard", out, meta, param;
    double scale = 0.0;
  } rp, rd;
  auto add_render = [](CLI::App* s, RenderArgs& a) {
    s->add_option("--family", a.family)->check(CLI::IsMember({"newton", "antipodal"}));
    s->add_option("--center", a.center, "viewport centre RE,IM")->required();
    s->add_option("--scale", a.scale, "plane units per pixel")->required();
    s->add_option("--size", a.size, "WxH");
    s->add_option("--tier", a.tier)->check(CLI::IsMember({"preview", "standard", "analysis"}));
    s->add_option("--out", a.out, "PNG path")->required();
    s->add_option("--meta", a.meta, "metadata JSON path");
  };
  auto* rparam = app.add_subcommand("render-param", "render a parameter-plane viewport");
  add_render(rparam, rp);
  auto* rdyn = app.add_subcommand("render-dyn", "render a dynamical-plane viewport");
  add_render(rdyn, rd);
  rdyn->add_option("--param", rd.param, "parameter of the map RE,IM")->required();

  // figure
  auto* fg = app.add_subcommand("figure", "reproduce a named figure");
  std::string fg_id, fg_out = ".";
  fg->add_option("id", fg_id, "figure id (or 'list')")->required();
  fg->add_option("--outdir", fg_out);

  // serve
  auto* sv = app.add_subcommand("serve", "run the HTTP service");
  int sv_port = 8080, sv_zoom = 40;
  std::string sv_host = "127.0.0.1", sv_cache;
  sv->add_option("--port", sv_port);
  sv->add_option("--host", sv_host);
  sv->add_option("--cache-dir", sv_cache, "tile cache (default $ATLAS_CACHE_DIR)");
  sv->add_option("--max-zoom", sv_zoom);

  CLI11_PARSE(app, argc, argv);

  if (atlas_session_new(&g_session) != 0) return report_failure();
  struct Closer {
    ~Closer() { atlas_session_free(g_session); }
  } closer;
  if (atlas_set_option(g_session, "threads", std::to_string(threads).c_str()) != 0)
    return report_failure();

  if (*cl) {
    char* out = nullptr;
    return emit(atlas_classify(g_session, cl_family.c_str(), cl_param.c_str(), cl_tier.c_str(), &out),
                out);
  }
  if (*ta) return analyze(ta_t.head("arc-trace") + ",\"targets\":" + json_list(ta_targets) + "}");
  if (*ph)
    return analyze(ph_t.head("phase") + ",\"h\":" + num(ph_h) + ",\"distances\":" +
                   json_list(ph_dist) + "}");
  if (*vi) return analyze(vi_t.head("visibility") + ",\"floor\":" + num(vi_floor) + "}");
  if (*sc) {
    std::string req = sc_t.head("scan") + ",\"window\":" + num(sc_window);
    if (sc_normals > 0) req += ",\"normals_per_sample\":" + std::to_string(sc_normals);
    if (sc_offsets > 0) req += ",\"offsets\":" + std::to_string(sc_offsets);
    return analyze(req + "}");
  }
  if (*rparam || *rdyn) {
    const RenderArgs& a = *rparam ? rp : rd;
    int w = 0, h = 0;
    if (!parse_size(a.size, w, h)) {
      std::fprintf(stderr, "atlas: --size must look like 512x512\n");
      return 2;
    }
    int rc = atlas_render(g_session, a.family.c_str(), *rparam ? "param" : "dyn",
                          *rparam ? nullptr : a.param.c_str(), a.center.c_str(), a.scale, w, h,
                          a.tier.c_str(), a.out.c_str(), a.meta.empty() ? nullptr : a.meta.c_str());
    if (rc != 0) return report_failure();
    std::printf("%s\n", a.out.c_str());
    if (!a.meta.empty()) std::printf("%s\n", a.meta.c_str());
    return 0;
  }
  if (*fg) {
    char* out = nullptr;
    if (fg_id == "list") {
      if (atlas_figure_ids(&out) != 0) return report_failure();
      std::fputs(out, stdout);
      atlas_free_string(out);
      return 0;
    }
    return emit(atlas_figure(g_session, fg_id.c_str(), fg_out.c_str(), &out), out);
  }
  if (*sv) {
    if (!sv_cache.empty() && atlas_set_option(g_session, "cache_dir", sv_cache.c_str()) != 0)
      return report_failure();
    if (atlas_set_option(g_session, "max_zoom", std::to_string(sv_zoom).c_str()) != 0)
      return report_failure();
    std::fprintf(stderr, "atlas: serving on http://%s:%d\n", sv_host.c_str(), sv_port);
    if (atlas_serve(g_session, sv_host.c_str(), sv_port) != 0) return report_failure();
    return 0;
  }
  return 1;
}
