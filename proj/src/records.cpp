#include "atlas/records.hpp"

#include <cmath>

namespace atlas::records {

namespace {

json complex_or_null(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return nullptr;
  return format_complex(z);
}

[[noreturn]] void bad(const std::string& msg) { fail(ErrorCode::InvalidArgument, msg); }

const json& need(const json& req, const char* key) {
  auto it = req.find(key);
  if (it == req.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

std::string need_string(const json& req, const char* key) {
  const auto& v = need(req, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double opt_number(const json& req, const char* key, double dflt) {
  auto it = req.find(key);
  if (it == req.end()) return dflt;
  if (!it->is_number()) bad(std::string("field '") + key + "' must be a number");
  double x = it->get<double>();
  if (!std::isfinite(x)) bad(std::string("field '") + key + "' must be finite");
  return x;
}

std::optional<int> opt_int(const json& req, const char* key) {
  auto it = req.find(key);
  if (it == req.end()) return std::nullopt;
  if (!it->is_number_integer()) bad(std::string("field '") + key + "' must be an integer");
  return it->get<int>();
}

std::vector<double> number_list(const json& req, const char* key,
                                std::vector<double> dflt, bool required) {
  auto it = req.find(key);
  if (it == req.end()) {
    if (required) bad(std::string("missing field '") + key + "'");
    return dflt;
  }
  if (!it->is_array() || it->empty())
    bad(std::string("field '") + key + "' must be a non-empty array");
  std::vector<double> out;
  for (const auto& x : *it) {
    if (!x.is_number()) bad(std::string("field '") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Parameter center_of(const json& req) {
  Family fam = parse_family(need_string(req, "family"));
  cplx c = parse_complex(need_string(req, "center"));
  auto p = Parameter::make(fam, c);
  if (fam == Family::Newton && !p.in_u)
    fail(ErrorCode::OutsideDomain, "center lies outside the Newton domain");
  return p;
}

int pick_arc(const json& req, const ComponentArcs& ca, bool prefer_coroot) {
  if (auto a = opt_int(req, "arc")) {
    if (*a < 0 || *a > 2) bad("field 'arc' must be 0, 1 or 2");
    return *a;
  }
  if (prefer_coroot) {
    if (ca.triple.symmetric_index && ca.arcs[size_t(*ca.triple.symmetric_index)])
      return *ca.triple.symmetric_index;
    for (int k = 0; k < 3; ++k)
      if (ca.triple.tags[size_t(k)] == PointTag::CoRoot && ca.arcs[size_t(k)]) return k;
  }
  for (int k = 0; k < 3; ++k)
    if (ca.arcs[size_t(k)]) return k;
  fail(ErrorCode::SeedingFailed, "no boundary arc found for this center");
}

const ParabolicDatum& arc_start(const ComponentArcs& ca, int k) {
  if (!ca.arcs[size_t(k)]) fail(ErrorCode::SeedingFailed, "arc not found for this index");
  return *ca.arcs[size_t(k)];
}

json arc_trace(const json& req) {
  auto center = center_of(req);
  auto targets = number_list(req, "targets", {}, true);
  auto ca = component_arcs(center);
  int k = pick_arc(req, ca, false);
  auto tr = trace_arc(arc_start(ca, k), targets);
  json samples = json::array();
  for (const auto& s : tr.samples) samples.push_back(ecalle_sample(s));
  return {{"kind", "arc-trace"},
          {"family", family_name(center.family)},
          {"center", format_complex(center.value)},
          {"arc", k},
          {"tag", tag_name(ca.triple.tags[size_t(k)])},
          {"period", ca.triple.period},
          {"samples", samples},
          {"path_points", tr.path.size()},
          {"cusp_reached", tr.cusp_reached},
          {"stalled", tr.stalled}};
}

json visibility(const json& req) {
  auto center = center_of(req);
  double floor = opt_number(req, "floor", 1e-6);
  if (!(floor > 0)) bad("field 'floor' must be positive");
  auto tri = half_return_boundary_points(center);
  json pts = json::array();
  for (size_t k = 0; k < tri.points.size(); ++k) {
    json e = {{"point", format_complex(tri.points[k])}, {"tag", tag_name(tri.tags[k])}};
    if (tri.tags[k] == PointTag::CoRoot) {
      auto v = coroot_visibility(center, tri.points[k], floor);
      e["verdict"] = visibility_name(v.state);
      e["witness"] = v.state == VisibilityState::Visible ? json(target_name(v.witness)) : json(nullptr);
      e["finest_radius"] = v.finest_radius;
    } else {
      e["verdict"] = nullptr;
    }
    pts.push_back(e);
  }
  return {{"kind", "visibility"},
          {"family", family_name(center.family)},
          {"center", format_complex(center.value)},
          {"period", tri.period},
          {"floor", floor},
          {"symmetric_index", tri.symmetric_index ? json(*tri.symmetric_index) : json(nullptr)},
          {"max_residual", tri.max_residual},
          {"points", pts}};
}

json scan(const json& req) {
  auto center = center_of(req);
  double window = opt_number(req, "window", 1e-2);
  if (!(window > 0)) bad("field 'window' must be positive");
  ScanOptions opt;
  if (auto v = opt_int(req, "normals_per_sample")) opt.normals_per_sample = std::max(1, *v);
  if (auto v = opt_int(req, "offsets")) opt.offsets = std::max(2, *v);
  if (auto it = req.find("refine_centers"); it != req.end()) {
    if (!it->is_boolean()) bad("field 'refine_centers' must be a boolean");
    opt.refine_centers = it->get<bool>();
  }
  auto ca = component_arcs(center);
  int k = pick_arc(req, ca, true);
  auto res = scan_component_arc(ca, k, window, opt);
  json out = scan_report(res.report);
  out["kind"] = "scan";
  out["family"] = family_name(center.family);
  out["center"] = format_complex(center.value);
  out["arc"] = k;
  out["tag"] = tag_name(res.tag);
  out["heights"] = res.heights;
  out["window"] = window;
  return out;
}

json phase(const json& req) {
  auto center = center_of(req);
  double h = opt_number(req, "h", 0.0);
  auto dists = number_list(req, "distances", {1e-3, 1e-4, 1e-5}, false);
  auto ca = component_arcs(center);
  int k = pick_arc(req, ca, false);
  auto tr = trace_arc(arc_start(ca, k), {h});
  if (tr.data.empty()) fail(ErrorCode::ContinuationStalled, "arc height not reached");
  const auto& d = tr.data.front();
  cplx n = arc_normal(d);
  json samples = json::array();
  for (double t : dists) {
    json e = {{"distance", t}};
    try {
      e.update(phase_sample(repelling_fatou_and_phase(d.param.value + t * n, d)));
    } catch (const Error& err) {
      e["error"] = error_name(err.code());
    }
    samples.push_back(e);
  }
  return {{"kind", "phase"},
          {"family", family_name(center.family)},
          {"center", format_complex(center.value)},
          {"arc", k},
          {"arc_point", ecalle_sample(tr.samples.front())},
          {"normal", format_complex(n)},
          {"samples", samples}};
}

}  // namespace

json classification(Family fam, cplx value, Tier tier) {
  auto p = Parameter::make(fam, value);
  json out = {{"family", family_name(fam)},
              {"parameter", format_complex(value)},
              {"tier", tier_name(tier)}};
  if (fam == Family::Newton) out["region"] = region_name(region_membership(value).region);
  if (fam == Family::Newton && !p.in_u) {
    out["verdict"] = "OutsideDomain";
    out["component"] = "OutsideDomain";
    out["period"] = 0;
    out["multiplier"] = nullptr;
    out["self_symmetric"] = nullptr;
    out["budget_spent"] = 0;
    return out;
  }
  auto c = classify(p, tier_budget(tier));
  out["verdict"] = c.verdict_string();
  out["component"] = c.component_string();
  bool cyc = c.kind == VerdictKind::AttractingCycle;
  out["period"] = cyc ? c.cycle.period : 0;
  out["multiplier"] = cyc ? complex_or_null(c.cycle.multiplier) : json(nullptr);
  out["self_symmetric"] = cyc ? json(c.cycle.self_symmetric) : json(nullptr);
  out["budget_spent"] = c.budget_spent;
  return out;
}

json query_result(Family fam, cplx value, Tier tier) {
  json cls = classification(fam, value, tier);
  json out = {{"parameter", format_complex(value)}, {"classification", cls}};
  std::string comp = cls["component"];
  if (comp.rfind("Tricorn(", 0) == 0) {
    int half = std::stoi(comp.substr(8)) / 2;
    if (half >= 1) {
      if (auto c = refine_center(fam, value, half)) {
        auto pc = Parameter::make(fam, *c);
        if (fam == Family::Antipodal || pc.in_u)
          out["nearest_center"] = {{"parameter", format_complex(*c)},
                                   {"period", 2 * half},
                                   {"distance", std::abs(*c - value)}};
      }
    }
  }
  return out;
}

json ecalle_sample(const EcalleSample& s) {
  return {{"parameter", format_complex(s.param)},
          {"h", s.h},
          {"multiplier_residual", s.multiplier_residual},
          {"petal_kind", petal_name(s.petal_kind)}};
}

json phase_sample(const PhaseSample& s) {
  return {{"parameter", format_complex(s.param)},
          {"escape_time", s.escape_time},
          {"lifted_phase", s.lifted_phase},
          {"transit_height", s.transit_height},
          {"incoming_height", s.incoming_height}};
}

json scan_report(const ScanReport& r) {
  auto hits = [](const std::vector<ScanHit>& v) {
    json a = json::array();
    for (const auto& h : v) a.push_back({{"parameter", format_complex(h.param)}, {"period", h.period}});
    return a;
  };
  json seg = json::array(), caps = json::array();
  for (cplx z : r.arc_segment) seg.push_back(format_complex(z));
  for (cplx z : r.capture_samples) caps.push_back(format_complex(z));
  return {{"arc_segment", seg},
          {"principal_contact", r.principal_contact},
          {"capture_hits", r.capture_hits},
          {"capture_samples", caps},
          {"tricorn_hits", hits(r.tricorn_hits)},
          {"mandelbrot_hits", hits(r.mandelbrot_hits)},
          {"h1", r.h1},
          {"h2", r.h2},
          {"classified", r.classified}};
}

void validate_analysis(const json& req) {
  if (!req.is_object()) bad("request body must be a JSON object");
  std::string kind = need_string(req, "kind");
  if (kind != "arc-trace" && kind != "visibility" && kind != "scan" && kind != "phase")
    bad("unknown analysis kind '" + kind + "'");
  parse_family(need_string(req, "family"));
  parse_complex(need_string(req, "center"));
  if (kind == "arc-trace") number_list(req, "targets", {}, true);
  if (kind == "phase") {
    opt_number(req, "h", 0.0);
    number_list(req, "distances", {}, false);
  }
  if (kind == "visibility") opt_number(req, "floor", 1e-6);
  if (kind == "scan") {
    opt_number(req, "window", 1e-2);
    opt_int(req, "normals_per_sample");
    opt_int(req, "offsets");
  }
  if (kind != "visibility")
    if (auto a = opt_int(req, "arc"); a && (*a < 0 || *a > 2)) bad("field 'arc' must be 0, 1 or 2");
}

json run_analysis(const json& req) {
  validate_analysis(req);
  std::string kind = req["kind"];
  if (kind == "arc-trace") return arc_trace(req);
  if (kind == "visibility") return visibility(req);
  if (kind == "scan") return scan(req);
  return phase(req);
}

json error_body(const Error& e) {
  return {{"error", error_name(e.code())}, {"message", e.what()}};
}

}  // namespace atlas::records
