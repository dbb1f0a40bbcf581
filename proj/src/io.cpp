#include "gradjump/io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "gradjump/error.hpp"

namespace gradjump {

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

std::size_t get_count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw ConfigError(where + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

template <class T, class F>
void read_opt(const json& obj, const char* key, T& out, const std::string& where, F conv) {
  if (obj.contains(key)) out = conv(obj.at(key), where + "." + key);
}

json params_to_json(const AntiplaneParams& p) {
  return {{"mu_plus", p.mu_plus}, {"mu_minus", p.mu_minus}, {"w_plus", p.w_plus}, {"w_minus", p.w_minus}};
}

AntiplaneParams antiplane_params_from_json(const json& j, const std::string& where) {
  check_keys(j, {"mu_plus", "mu_minus", "w_plus", "w_minus"}, where);
  AntiplaneParams p;
  read_opt(j, "mu_plus", p.mu_plus, where, get_number);
  read_opt(j, "mu_minus", p.mu_minus, where, get_number);
  read_opt(j, "w_plus", p.w_plus, where, get_number);
  read_opt(j, "w_minus", p.w_minus, where, get_number);
  return p;
}

std::vector<Mat> mats_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of matrices");
  std::vector<Mat> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(mat_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json mats_to_json(const std::vector<Mat>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back(to_json(m));
  return a;
}

// JSON has no infinity; null stands for "no bound".
json bound_to_json(double x) { return std::isinf(x) ? json(nullptr) : json(x); }

double bound_from_json(const json& j, const std::string& where) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return get_number(j, where);
}

QuadratureConfig quadrature_from_json(const json& j, const std::string& where) {
  check_keys(j, {"seed", "samples_slab", "samples_bulk", "stratification", "max_error", "max_refinements"}, where);
  QuadratureConfig q;
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0))
      throw ConfigError(where + ".seed: expected a non-negative integer");
    q.seed = s.get<std::uint64_t>();
  }
  read_opt(j, "samples_slab", q.samples_slab, where, get_count);
  read_opt(j, "samples_bulk", q.samples_bulk, where, get_count);
  read_opt(j, "max_refinements", q.max_refinements, where, get_count);
  read_opt(j, "max_error", q.max_error, where, bound_from_json);
  if (j.contains("stratification")) {
    const json& s = j.at("stratification");
    if (!s.is_array()) throw ConfigError(where + ".stratification: expected an array of names");
    q.stratification.clear();
    for (const auto& e : s) {
      if (!e.is_string()) throw ConfigError(where + ".stratification: expected strings");
      q.stratification.push_back(stratum_from_string(e.get<std::string>()));
    }
  }
  return q;
}

json quadrature_to_json(const QuadratureConfig& q) {
  json strata = json::array();
  for (auto s : q.stratification) strata.push_back(to_string(s));
  return {{"seed", q.seed},
          {"samples_slab", q.samples_slab},
          {"samples_bulk", q.samples_bulk},
          {"stratification", strata},
          {"max_error", bound_to_json(q.max_error)},
          {"max_refinements", q.max_refinements}};
}

json points_to_json(const std::vector<LimitPoint>& pts, const char* abscissa) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({{abscissa, p.h}, {"value", p.value}, {"error", p.error}});
  return a;
}

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::DegeneratePair: return "degenerate_pair";
    case ErrorKind::IncompatiblePair: return "incompatible_pair";
    case ErrorKind::NonsmoothPoint: return "nonsmooth_point";
    case ErrorKind::Quadrature: return "quadrature";
    case ErrorKind::OutOfRegion: return "out_of_region";
    case ErrorKind::BinodalEmpty: return "binodal_empty";
    case ErrorKind::Nonconvergence: return "nonconvergence";
    case ErrorKind::Config: return "config";
    case ErrorKind::Unsupported: return "unsupported";
  }
  return "unknown";
}

}  // namespace

json to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
  return rows;
}

json to_json(std::span<const double> v) { return json(Vec(v.begin(), v.end())); }

Mat mat_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array of rows");
  std::vector<Vec> rows;
  for (const auto& r : j) rows.push_back(vec_from_json(r, where));
  try {
    return Mat::from_rows(rows);
  } catch (const DimensionError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

Vec vec_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  Vec v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(get_number(x, where));
  return v;
}

EnergyModel model_from_json(const json& j) {
  const std::string where = "model";
  check_keys(j, {"kind", "m", "d", "params", "gradient_mode"}, where);
  if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError("model.kind: missing or not a string");
  const EnergyKind kind = energy_kind_from_string(j.at("kind").get<std::string>());
  const json params = j.value("params", json::object());
  const std::string pw = "model.params";

  std::optional<std::size_t> m, d;
  if (j.contains("m")) m = get_count(j.at("m"), "model.m");
  if (j.contains("d")) d = get_count(j.at("d"), "model.d");
  auto need = [&](const std::optional<std::size_t>& v, const char* name) {
    if (!v) throw ConfigError(std::string("model.") + name + ": required for this kind");
    return *v;
  };
  auto expect = [&](const std::optional<std::size_t>& v, std::size_t want, const char* name) {
    if (v && *v != want)
      throw ConfigError(std::string("model.") + name + ": must be " + std::to_string(want) + " for this kind");
  };

  std::optional<EnergyModel> model;
  switch (kind) {
    case EnergyKind::Quadratic: {
      check_keys(params, {"mu"}, pw);
      double mu = 1.0;
      read_opt(params, "mu", mu, pw, get_number);
      model = EnergyModel::quadratic(need(m, "m"), need(d, "d"), mu);
      break;
    }
    case EnergyKind::MinOfQuadratics: {
      check_keys(params, {"wells"}, pw);
      if (!params.contains("wells") || !params.at("wells").is_array())
        throw ConfigError(pw + ".wells: expected an array");
      std::vector<Well> wells;
      for (std::size_t i = 0; i < params.at("wells").size(); ++i) {
        const json& wj = params.at("wells")[i];
        const std::string ww = pw + ".wells[" + std::to_string(i) + "]";
        check_keys(wj, {"mu", "offset", "w"}, ww);
        Well w;
        read_opt(wj, "mu", w.mu, ww, get_number);
        read_opt(wj, "w", w.w, ww, get_number);
        if (wj.contains("offset")) w.offset = mat_from_json(wj.at("offset"), ww + ".offset");
        wells.push_back(std::move(w));
      }
      model = EnergyModel::min_of_quadratics(need(m, "m"), need(d, "d"), std::move(wells));
      break;
    }
    case EnergyKind::AntiplaneDoubleWell:
      expect(m, 1, "m");
      expect(d, 2, "d");
      model = EnergyModel::antiplane(antiplane_params_from_json(params, pw));
      break;
    case EnergyKind::IsotropicTheta: {
      check_keys(params, {"mu", "f"}, pw);
      IsotropicParams p;
      p.d = need(d, "d");
      expect(m, p.d, "m");
      read_opt(params, "mu", p.mu, pw, get_number);
      if (!params.contains("f")) throw ConfigError(pw + ".f: polynomial coefficients required");
      p.f.coeffs = vec_from_json(params.at("f"), pw + ".f");
      model = EnergyModel::isotropic(p);
      break;
    }
    case EnergyKind::CustomTabulated: {
      check_keys(params, {"radius", "energy"}, pw);
      TabulatedParams p;
      if (!params.contains("radius") || !params.contains("energy"))
        throw ConfigError(pw + ": radius and energy tables required");
      p.radius = vec_from_json(params.at("radius"), pw + ".radius");
      p.energy = vec_from_json(params.at("energy"), pw + ".energy");
      model = EnergyModel::tabulated(need(m, "m"), need(d, "d"), std::move(p));
      break;
    }
  }

  if (j.contains("gradient_mode")) {
    const json& g = j.at("gradient_mode");
    if (g.is_string()) {
      if (g.get<std::string>() != "analytic")
        throw ConfigError("model.gradient_mode: expected \"analytic\" or {\"fd_step\": step}");
      model = model->with_gradient_mode(GradientMode{});
    } else {
      check_keys(g, {"fd_step"}, "model.gradient_mode");
      if (!g.contains("fd_step")) throw ConfigError("model.gradient_mode.fd_step: required");
      const double step = get_number(g.at("fd_step"), "model.gradient_mode.fd_step");
      if (!(step > 0.0)) throw ConfigError("model.gradient_mode.fd_step: must be positive");
      model = model->with_gradient_mode(GradientMode::central_difference(step));
    }
  }
  return *model;
}

json model_to_json(const EnergyModel& model) {
  json j;
  j["kind"] = to_string(model.kind());
  j["m"] = model.m();
  j["d"] = model.d();
  json params = json::object();
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, QuadraticParams>) {
          params["mu"] = p.mu;
        } else if constexpr (std::is_same_v<P, MinOfQuadraticsParams>) {
          json wells = json::array();
          for (const auto& w : model.wells()) wells.push_back({{"mu", w.mu}, {"offset", to_json(w.offset)}, {"w", w.w}});
          params["wells"] = wells;
        } else if constexpr (std::is_same_v<P, AntiplaneParams>) {
          params = params_to_json(p);
        } else if constexpr (std::is_same_v<P, IsotropicParams>) {
          params["mu"] = p.mu;
          params["f"] = p.f.coeffs;
        } else {
          params["radius"] = p.radius;
          params["energy"] = p.energy;
        }
      },
      model.params());
  j["params"] = params;
  if (model.gradient_mode().analytic)
    j["gradient_mode"] = "analytic";
  else
    j["gradient_mode"] = {{"fd_step", model.gradient_mode().fd_step}};
  return j;
}

json to_json(const JumpDiagnostics& d) {
  return {
      {"residuals",
       {{"p_star", d.p_star},
        {"frak_n", d.frak_n},
        {"traction", d.traction_residual},
        {"roughening", d.roughening_residual},
        {"weierstrass_min_plus", d.weierstrass_min_plus},
        {"weierstrass_min_minus", d.weierstrass_min_minus},
        {"normality_gap", d.normality_gap}}},
      {"tolerances",
       {{"abs", d.tolerances.abs},
        {"rel", d.tolerances.rel},
        {"stress_scale", d.stress_scale},
        {"energy_scale", d.energy_scale},
        {"stress_tol", d.stress_tol},
        {"energy_tol", d.energy_tol}}},
      {"verdicts",
       {{"maxwell_ok", d.maxwell_ok},
        {"traction_ok", d.traction_ok},
        {"roughening_ok", d.roughening_ok},
        {"interchange_ok", d.interchange_ok},
        {"weierstrass_ok", d.weierstrass_ok},
        {"all_ok", d.all_ok()}}},
  };
}

json to_json(const ScanResult& s) {
  return {{"min_value", s.min_value}, {"u", s.u}, {"v", s.v}, {"r", s.r}, {"evaluations", s.evaluations}};
}

json to_json(const VariationResult& v) {
  json regions = json::object();
  for (const auto& [r, e] : v.region_measures) regions[to_string(r)] = {{"value", e.value}, {"error", e.error}};
  return {{"delta_e", v.delta_e}, {"mc_error", v.mc_error}, {"region_measures", regions}, {"samples", v.samples}};
}

json to_json(const LimitFit& f) {
  return {{"points", points_to_json(f.points, "h")},
          {"limit", f.limit},
          {"limit_error", f.limit_error},
          {"slope", f.slope},
          {"curvature", f.curvature},
          {"rate", f.rate},
          {"residual_rms", f.residual_rms},
          {"target", f.target},
          {"converged", f.converged}};
}

json to_json(const CommutationResult& c) {
  return {{"t_first", points_to_json(c.t_first, "h")},
          {"t_first_fit", to_json(c.t_first_fit)},
          {"h_first", points_to_json(c.h_first, "t")},
          {"h_first_limit", c.h_first_limit},
          {"h_first_error", c.h_first_error},
          {"target", c.target}};
}

json to_json(const AntiplaneAnalysis& a) {
  return {{"params", params_to_json(a.params)},
          {"relabeled", a.relabeled},
          {"eps_plus", a.eps_plus},
          {"eps_minus", a.eps_minus},
          {"yield_radius", a.yield_radius},
          {"middle_slope", a.middle_slope},
          {"middle_offset", a.middle_offset}};
}

json to_json(const AffineSegment& s) {
  return {{"t_start", s.t_start}, {"t_end", s.t_end}, {"slope", s.slope}, {"intervals", s.intervals}, {"proper", s.proper()}};
}

json to_json(const AffineReport& r) {
  return {{"max_deviation", r.max_deviation}, {"t_at_max", r.t_at_max}, {"tol", r.tol}, {"pass", r.pass}};
}

json to_json(const DirectionalDerivative& d) {
  return {{"value", d.value}, {"expected", d.expected}, {"intervals", d.intervals}, {"change", d.change}};
}

json to_json(const PlasticMechanism& m) {
  return {{"fp", to_json(m.pair.fp)},
          {"fm", to_json(m.pair.fm)},
          {"yield_normal", to_json(m.yield_normal)},
          {"yield_offset", m.yield_offset},
          {"frak_n", m.frak_n},
          {"normality", m.normality},
          {"gap_plus", m.gap_plus},
          {"gap_minus", m.gap_minus},
          {"origin_distance", m.origin_distance}};
}

json error_to_json(const std::exception& e) {
  json j = {{"message", e.what()}};
  if (const auto* ge = dynamic_cast<const Error*>(&e)) {
    j["kind"] = kind_name(ge->kind());
    if (const auto* ip = dynamic_cast<const IncompatiblePairError*>(&e)) j["singular_ratio"] = ip->singular_ratio;
    if (const auto* ns = dynamic_cast<const NonsmoothPointError*>(&e)) {
      j["branches"] = {ns->branch_a, ns->branch_b};
      j["gradients"] = {to_json(ns->grad_a), to_json(ns->grad_b)};
    }
  } else {
    j["kind"] = "internal";
  }
  return {{"error", j}};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw DimensionError("csv row width differs from header");
  rows.push_back(std::move(row));
}

std::string CsvTable::render() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    out += "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

RunConfig config_from_json(const json& j) {
  try {
    check_keys(j, {"model", "pair", "tolerances", "scan", "interchange", "path", "envelope", "antiplane", "outputs"},
               "config");
    RunConfig c;
    if (j.contains("model")) c.model = model_from_json(j.at("model"));

    if (j.contains("pair")) {
      const json& p = j.at("pair");
      check_keys(p, {"Fp", "Fm", "tol"}, "pair");
      if (!p.contains("Fp") || !p.contains("Fm")) throw ConfigError("pair: Fp and Fm are required");
      PairConfig pc;
      pc.fp = mat_from_json(p.at("Fp"), "pair.Fp");
      pc.fm = mat_from_json(p.at("Fm"), "pair.Fm");
      read_opt(p, "tol", pc.tol, "pair", get_number);
      c.pair = std::move(pc);
    }

    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      check_keys(t, {"abs", "rel", "affine", "fit_residual", "derivative"}, "tolerances");
      auto& o = c.tolerances;
      read_opt(t, "abs", o.abs, "tolerances", get_number);
      read_opt(t, "rel", o.rel, "tolerances", get_number);
      read_opt(t, "affine", o.affine, "tolerances", get_number);
      read_opt(t, "fit_residual", o.fit_residual, "tolerances", get_number);
      read_opt(t, "derivative", o.derivative, "tolerances", get_number);
    }

    if (j.contains("scan")) {
      const json& s = j.at("scan");
      check_keys(s, {"radii", "resolution", "points"}, "scan");
      if (s.contains("radii")) c.scan.radii = vec_from_json(s.at("radii"), "scan.radii");
      read_opt(s, "resolution", c.scan.resolution, "scan", get_count);
      if (s.contains("points")) c.scan.points = mats_from_json(s.at("points"), "scan.points");
    }

    if (j.contains("interchange")) {
      const json& s = j.at("interchange");
      check_keys(s, {"h_grid", "t", "t_grid", "nu", "quadrature"}, "interchange");
      auto& o = c.interchange;
      if (s.contains("h_grid")) o.h_grid = vec_from_json(s.at("h_grid"), "interchange.h_grid");
      read_opt(s, "t", o.t, "interchange", get_number);
      if (s.contains("t_grid")) o.t_grid = vec_from_json(s.at("t_grid"), "interchange.t_grid");
      if (s.contains("nu")) o.nu = vec_from_json(s.at("nu"), "interchange.nu");
      if (s.contains("quadrature")) o.quadrature = quadrature_from_json(s.at("quadrature"), "interchange.quadrature");
    }

    if (j.contains("path")) {
      check_keys(j.at("path"), {"points"}, "path");
      read_opt(j.at("path"), "points", c.path.points, "path", get_count);
    }

    if (j.contains("envelope")) {
      check_keys(j.at("envelope"), {"intervals"}, "envelope");
      read_opt(j.at("envelope"), "intervals", c.envelope.intervals, "envelope", get_count);
    }

    if (j.contains("antiplane")) {
      const json& s = j.at("antiplane");
      check_keys(s, {"params", "envelope_samples", "envelope_max", "mechanisms", "path"}, "antiplane");
      auto& o = c.antiplane;
      if (s.contains("params")) o.params = antiplane_params_from_json(s.at("params"), "antiplane.params");
      read_opt(s, "envelope_samples", o.envelope_samples, "antiplane", get_count);
      read_opt(s, "envelope_max", o.envelope_max, "antiplane", get_number);
      read_opt(s, "mechanisms", o.mechanisms, "antiplane", get_count);
      if (s.contains("path")) o.path = mats_from_json(s.at("path"), "antiplane.path");
    }

    if (j.contains("outputs")) {
      const json& s = j.at("outputs");
      check_keys(s, {"dir", "format"}, "outputs");
      if (s.contains("dir")) {
        if (!s.at("dir").is_string()) throw ConfigError("outputs.dir: expected a string");
        c.outputs.dir = s.at("dir").get<std::string>();
      }
      if (s.contains("format")) {
        if (!s.at("format").is_string()) throw ConfigError("outputs.format: expected a string");
        c.outputs.format = s.at("format").get<std::string>();
      }
      if (c.outputs.format != "json" && c.outputs.format != "csv")
        throw ConfigError("outputs.format: expected \"json\" or \"csv\"");
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

json config_to_json(const RunConfig& c) {
  json j;
  if (c.model) j["model"] = model_to_json(*c.model);
  if (c.pair) j["pair"] = {{"Fp", to_json(c.pair->fp)}, {"Fm", to_json(c.pair->fm)}, {"tol", c.pair->tol}};
  const auto& t = c.tolerances;
  j["tolerances"] = {{"abs", t.abs}, {"rel", t.rel}, {"affine", t.affine}, {"fit_residual", t.fit_residual},
                     {"derivative", t.derivative}};
  json scan = {{"resolution", c.scan.resolution}, {"points", mats_to_json(c.scan.points)}};
  if (c.scan.radii) scan["radii"] = *c.scan.radii;
  j["scan"] = scan;
  json ic = {{"h_grid", c.interchange.h_grid},
             {"t", c.interchange.t},
             {"t_grid", c.interchange.t_grid},
             {"quadrature", quadrature_to_json(c.interchange.quadrature)}};
  if (c.interchange.nu) ic["nu"] = *c.interchange.nu;
  j["interchange"] = ic;
  j["path"] = {{"points", c.path.points}};
  j["envelope"] = {{"intervals", c.envelope.intervals}};
  json ap = {{"envelope_samples", c.antiplane.envelope_samples},
             {"envelope_max", c.antiplane.envelope_max},
             {"mechanisms", c.antiplane.mechanisms},
             {"path", mats_to_json(c.antiplane.path)}};
  if (c.antiplane.params) ap["params"] = params_to_json(*c.antiplane.params);
  j["antiplane"] = ap;
  json out = {{"format", c.outputs.format}};
  if (c.outputs.dir) out["dir"] = *c.outputs.dir;
  j["outputs"] = out;
  return j;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace gradjump
