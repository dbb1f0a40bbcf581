#include "gradjump/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gradjump/error.hpp"

namespace gradjump {

namespace {

const EnergyModel& require_model(const RunConfig& c) {
  if (!c.model) throw ConfigError("config: a model section is required");
  return *c.model;
}

InterfacePair require_pair(const RunConfig& c) {
  if (!c.pair) throw ConfigError("config: a pair section is required");
  const EnergyModel& model = require_model(c);
  if (c.pair->fp.rows() != model.m() || c.pair->fp.cols() != model.d() || !c.pair->fp.same_shape(c.pair->fm))
    throw ConfigError("pair: matrices must be " + std::to_string(model.m()) + "x" + std::to_string(model.d()));
  return InterfacePair::make(c.pair->fp, c.pair->fm, c.pair->tol);
}

json pair_json(const InterfacePair& p) {
  return {{"Fp", to_json(p.fp)}, {"Fm", to_json(p.fm)}, {"a", p.a}, {"n", p.n.vec()}};
}

std::string num(double x) { return format_double(x); }
std::string num(std::size_t x) { return std::to_string(x); }
std::string flag(bool b) { return b ? "true" : "false"; }

}  // namespace

CommandResult cmd_check(const RunConfig& c) {
  const EnergyModel& model = require_model(c);
  const InterfacePair pair = require_pair(c);
  DiagnosticOptions opt;
  opt.tol = Tolerances{c.tolerances.abs, c.tolerances.rel};
  opt.radii = c.scan.radii;
  opt.resolution = c.scan.resolution;
  const JumpDiagnostics d = diagnose(model, pair, opt);

  CommandResult r;
  r.summary = {{"command", "check"}, {"model", model_to_json(model)}, {"pair", pair_json(pair)}, {"diagnostics", to_json(d)}};
  CsvTable t{"diagnostics", {"quantity", "value", "tolerance", "ok"}, {}};
  t.add_row({"p_star", num(d.p_star), num(d.stress_tol), flag(d.maxwell_ok)});
  t.add_row({"frak_n", num(d.frak_n), num(d.stress_tol), flag(d.interchange_ok)});
  for (std::size_t i = 0; i < d.traction_residual.size(); ++i)
    t.add_row({"traction_" + std::to_string(i), num(d.traction_residual[i]), num(d.stress_tol), flag(d.traction_ok)});
  for (std::size_t i = 0; i < d.roughening_residual.size(); ++i)
    t.add_row({"roughening_" + std::to_string(i), num(d.roughening_residual[i]), num(d.stress_tol),
               flag(d.roughening_ok)});
  t.add_row({"weierstrass_min_plus", num(d.weierstrass_min_plus), num(d.energy_tol), flag(d.weierstrass_ok)});
  t.add_row({"weierstrass_min_minus", num(d.weierstrass_min_minus), num(d.energy_tol), flag(d.weierstrass_ok)});
  t.add_row({"normality_gap", num(d.normality_gap), "", ""});
  r.tables.push_back(std::move(t));
  r.exit_code = d.all_ok() ? kExitPass : kExitFailure;
  return r;
}

CommandResult cmd_sweep_h(const RunConfig& c) {
  const EnergyModel& model = require_model(c);
  const InterfacePair pair = require_pair(c);
  const auto& ic = c.interchange;
  if (ic.h_grid.empty()) throw ConfigError("interchange.h_grid: empty");
  std::optional<UnitVector> nu;
  if (ic.nu) nu = UnitVector(*ic.nu);
  const InterchangeParams params = InterchangeParams::make(pair, ic.h_grid.front(), ic.t, nu, ic.quadrature);
  const LimitFit fit = limit_sweep(model, pair, params, ic.h_grid, c.tolerances.fit_residual);

  CommandResult r;
  r.summary = {{"command", "sweep-h"},
               {"model", model_to_json(model)},
               {"pair", pair_json(pair)},
               {"t", ic.t},
               {"seed", ic.quadrature.seed},
               {"fit", to_json(fit)}};
  CsvTable t{"sweep", {"h", "dE_over_h", "mc_error"}, {}};
  for (const auto& p : fit.points) t.add_row({num(p.h), num(p.value), num(p.error)});
  r.tables.push_back(std::move(t));

  bool ok = fit.converged;
  if (!ic.t_grid.empty()) {
    const CommutationResult cr = limit_commutation(model, pair, params, ic.h_grid, ic.t_grid);
    r.summary["commutation"] = to_json(cr);
    CsvTable tf{"commutation_t_first", {"h", "value", "error"}, {}};
    for (const auto& p : cr.t_first) tf.add_row({num(p.h), num(p.value), num(p.error)});
    CsvTable hf{"commutation_h_first", {"t", "value", "error"}, {}};
    for (const auto& p : cr.h_first) hf.add_row({num(p.h), num(p.value), num(p.error)});
    r.tables.push_back(std::move(tf));
    r.tables.push_back(std::move(hf));
    ok = ok && cr.t_first_fit.converged;
  }
  r.exit_code = ok ? kExitPass : kExitFailure;
  return r;
}

CommandResult cmd_path_dt(const RunConfig& c) {
  const EnergyModel& model = require_model(c);
  const InterfacePair pair = require_pair(c);
  if (c.path.points < 3) throw ConfigError("path.points: need at least three points");
  const Vec ts = uniform_grid(c.path.points - 1);
  const auto curve = d_path(model, pair, ts);

  std::optional<IsotropicPath> closed;
  if (model.kind() == EnergyKind::IsotropicTheta) {
    double tp = 0.0, tm = 0.0;
    for (std::size_t i = 0; i < model.d(); ++i) {
      tp += pair.fp(i, i);
      tm += pair.fm(i, i);
    }
    closed = d_path_isotropic(std::get<IsotropicParams>(model.params()), tp, tm, ts);
  }

  CommandResult r;
  CsvTable t{"path", {"t", "D"}, {}};
  if (closed) t.header.push_back("D_closed_form");
  std::size_t imax = 0;
  double max_dev = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    std::vector<std::string> row{num(curve[i].t), num(curve[i].value)};
    if (closed) {
      row.push_back(num(closed->curve[i].value));
      max_dev = std::max(max_dev, std::abs(closed->curve[i].value - curve[i].value));
    }
    t.add_row(std::move(row));
    if (curve[i].value > curve[imax].value) imax = i;
  }
  r.summary = {{"command", "path-dt"},
               {"model", model_to_json(model)},
               {"pair", pair_json(pair)},
               {"D_at_0", curve.front().value},
               {"D_at_1", curve.back().value},
               {"max", {{"t", curve[imax].t}, {"value", curve[imax].value}}}};
  if (closed) {
    r.summary["closed_form"] = {{"max_deviation", max_dev},
                                {"constraint_ok", closed->constraint_ok},
                                {"constraint_value", closed->constraint_value}};
  }
  r.tables.push_back(std::move(t));
  return r;
}

CommandResult cmd_envelope(const RunConfig& c) {
  const EnergyModel& model = require_model(c);
  const InterfacePair pair = require_pair(c);
  const EnvelopeCurve curve = rank_one_restriction(model, pair, uniform_grid(c.envelope.intervals));
  const AffineReport affine = check_affine_formula(model, pair, c.tolerances.affine, c.envelope.intervals);
  const PlasticMechanism mech = yield_plane(model, pair, c.tolerances.rel);

  CommandResult r;
  json segs = json::array();
  for (const auto& s : curve.affine_segments) segs.push_back(to_json(s));
  r.summary = {{"command", "envelope"},
               {"model", model_to_json(model)},
               {"pair", pair_json(pair)},
               {"affine_segments", segs},
               {"affine_check", to_json(affine)},
               {"yield_plane", to_json(mech)}};

  bool ok = affine.pass;
  DerivativeOptions dopt;
  dopt.tol = c.tolerances.derivative;
  for (auto [at, name] : {std::pair{Endpoint::Minus, "t0"}, std::pair{Endpoint::Plus, "t1"}}) {
    try {
      r.summary["directional_derivative"][name] = to_json(directional_derivative(model, pair, at, dopt));
    } catch (const NonconvergenceError& e) {
      r.summary["directional_derivative"][name] = error_to_json(e);
      ok = false;
    }
  }

  CsvTable t{"envelope", {"t", "W", "hull"}, {}};
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i)
    t.add_row({num(curve.t_grid[i]), num(curve.w_values[i]), num(curve.hull_values[i])});
  r.tables.push_back(std::move(t));
  r.exit_code = ok ? kExitPass : kExitFailure;
  return r;
}

CommandResult cmd_antiplane(const RunConfig& c) {
  AntiplaneParams params;
  if (c.antiplane.params) {
    params = *c.antiplane.params;
  } else if (c.model && c.model->kind() == EnergyKind::AntiplaneDoubleWell) {
    params = std::get<AntiplaneParams>(c.model->params());
  }
  const AntiplaneAnalysis an = antiplane_analyze(params);
  const EnergyModel model = EnergyModel::antiplane(an.params);
  const auto& ac = c.antiplane;
  if (ac.envelope_samples < 2) throw ConfigError("antiplane.envelope_samples: need at least two");
  if (!(ac.envelope_max > 0.0)) throw ConfigError("antiplane.envelope_max: must be positive");
  if (ac.mechanisms < 1) throw ConfigError("antiplane.mechanisms: need at least one");

  CommandResult r;
  CsvTable env{"envelope", {"r", "W", "QW"}, {}};
  json samples = json::array();
  for (std::size_t i = 0; i < ac.envelope_samples; ++i) {
    const double rad = ac.envelope_max * static_cast<double>(i) / static_cast<double>(ac.envelope_samples - 1);
    const double w = std::min(an.phase_energy_plus(rad), an.phase_energy_minus(rad));
    const double qw = an.envelope(rad);
    env.add_row({num(rad), num(w), num(qw)});
    samples.push_back({{"r", rad}, {"W", w}, {"QW", qw}});
  }

  CsvTable lines{"yield_lines", {"angle", "normal_x", "normal_y", "offset", "tangency_gap"}, {}};
  double max_gap = 0.0;
  for (std::size_t k = 0; k < ac.mechanisms; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(ac.mechanisms);
    const PlasticMechanism m = yield_plane(model, antiplane_mechanism(an, angle), c.tolerances.rel);
    const double gap = std::abs(m.origin_distance - an.yield_radius);
    max_gap = std::max(max_gap, gap);
    lines.add_row({num(angle), num(m.yield_normal(0, 0)), num(m.yield_normal(0, 1)), num(m.yield_offset), num(gap)});
  }

  std::vector<Mat> path = ac.path;
  if (path.empty()) {
    for (std::size_t i = 0; i <= 80; ++i) path.push_back(Mat{{0.5 + 2.0 * static_cast<double>(i) / 80.0, 0.0}});
  }
  for (const auto& f : path)
    if (f.rows() != 1 || f.cols() != 2) throw ConfigError("antiplane.path: points must be 1x2");
  const auto trace = loading_program(an, path);
  CsvTable load{"loading", {"step", "F_norm", "theta", "Px", "Py", "on_yield"}, {}};
  double plateau_dev = 0.0;
  for (const auto& s : trace) {
    load.add_row({num(s.step), num(s.f_norm), num(s.theta), num(s.stress[0]), num(s.stress[1]), flag(s.on_yield)});
    if (s.on_yield) plateau_dev = std::max(plateau_dev, std::abs(std::hypot(s.stress[0], s.stress[1]) - an.yield_radius));
  }

  r.summary = {{"command", "antiplane"},
               {"analysis", to_json(an)},
               {"envelope_samples", samples},
               {"max_tangency_gap", max_gap},
               {"max_plateau_deviation", plateau_dev}};
  r.tables.push_back(std::move(env));
  r.tables.push_back(std::move(lines));
  r.tables.push_back(std::move(load));
  return r;
}

CommandResult cmd_scan(const RunConfig& c) {
  const EnergyModel& model = require_model(c);
  std::vector<Mat> points = c.scan.points;
  if (points.empty() && c.pair) points = {c.pair->fp, c.pair->fm};
  if (points.empty()) throw ConfigError("scan: no points (give scan.points or a pair)");

  CommandResult r;
  CsvTable t{"scan", {"index", "W", "min_value", "r"}, {}};
  for (std::size_t i = 0; i < model.m(); ++i) t.header.push_back("u_" + std::to_string(i));
  for (std::size_t i = 0; i < model.d(); ++i) t.header.push_back("v_" + std::to_string(i));
  t.header.push_back("ok");

  json results = json::array();
  bool all_ok = true;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Mat& f = points[k];
    if (f.rows() != model.m() || f.cols() != model.d())
      throw ConfigError("scan.points[" + std::to_string(k) + "]: wrong shape");
    const Vec radii = c.scan.radii ? *c.scan.radii : default_scan_radii(1.0 + frobenius_norm(f));
    const ScanResult s = weierstrass_scan(model, f, radii, c.scan.resolution);
    const double w = model.eval(f);
    const double tol = Tolerances{c.tolerances.abs, c.tolerances.rel}.bound(std::abs(w));
    const bool ok = s.min_value >= -tol;
    all_ok = all_ok && ok;
    results.push_back({{"F", to_json(f)}, {"W", w}, {"scan", to_json(s)}, {"tolerance", tol}, {"ok", ok}});
    std::vector<std::string> row{num(k), num(w), num(s.min_value), num(s.r)};
    for (double x : s.u) row.push_back(num(x));
    for (double x : s.v) row.push_back(num(x));
    row.push_back(flag(ok));
    t.add_row(std::move(row));
  }
  r.summary = {{"command", "scan"}, {"model", model_to_json(model)}, {"resolution", c.scan.resolution}, {"results", results}};
  r.tables.push_back(std::move(t));
  r.exit_code = all_ok ? kExitPass : kExitFailure;
  return r;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"check", "sweep-h", "path-dt", "envelope", "antiplane", "scan"};
  return names;
}

CommandResult run_command(const std::string& name, const RunConfig& config) {
  try {
    if (name == "check") return cmd_check(config);
    if (name == "sweep-h") return cmd_sweep_h(config);
    if (name == "path-dt") return cmd_path_dt(config);
    if (name == "envelope") return cmd_envelope(config);
    if (name == "antiplane") return cmd_antiplane(config);
    if (name == "scan") return cmd_scan(config);
    throw ConfigError("unknown command '" + name + "'");
  } catch (const ConfigError& e) {
    return {kExitConfig, error_to_json(e), {}};
  } catch (const DimensionError& e) {
    return {kExitConfig, error_to_json(e), {}};
  } catch (const Error& e) {
    return {kExitFailure, error_to_json(e), {}};
  }
}

}  // namespace gradjump
