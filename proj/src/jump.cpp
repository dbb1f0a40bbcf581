#include "gradjump/jump.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gradjump/error.hpp"
#include "gradjump/kernels.hpp"

namespace gradjump {

InterfacePair InterfacePair::make(Mat fp, Mat fm, double tol) {
  RankOne r = rank_one_decompose(fp, fm, tol);
  return InterfacePair{std::move(fp), std::move(fm), std::move(r.a), std::move(r.n), tol};
}

namespace {

struct Stresses {
  Mat p_plus;
  Mat p_minus;
  Mat jump() const { return p_plus - p_minus; }
};

Stresses stresses(const EnergyModel& model, const InterfacePair& pair) {
  return {model.piola(pair.fp), model.piola(pair.fm)};
}

}  // namespace

double interchange_force(const EnergyModel& model, const InterfacePair& pair) {
  return frobenius(stresses(model, pair).jump(), pair.jump());
}

double maxwell_force(const EnergyModel& model, const InterfacePair& pair) {
  const Stresses s = stresses(model, pair);
  const Mat mean = 0.5 * (s.p_plus + s.p_minus);
  return model.eval(pair.fp) - model.eval(pair.fm) - frobenius(mean, pair.jump());
}

Vec traction_residual(const EnergyModel& model, const InterfacePair& pair) {
  return gradjump::apply(stresses(model, pair).jump(), pair.n.vec());
}

Vec roughening_residual(const EnergyModel& model, const InterfacePair& pair) {
  return apply_transpose(stresses(model, pair).jump(), pair.a);
}

Vec default_scan_radii(double scale, std::size_t count) {
  if (!(scale > 0.0) || count < 2) throw ConfigError("default_scan_radii: need scale > 0, count >= 2");
  Vec radii(count);
  const double lo = std::log(1e-3 * scale);
  const double hi = std::log(10.0 * scale);
  for (std::size_t i = 0; i < count; ++i)
    radii[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  return radii;
}

ScanResult weierstrass_scan(const EnergyModel& model, const Mat& f, std::span<const double> radii,
                            std::size_t resolution) {
  if (radii.empty()) throw ConfigError("weierstrass_scan: empty radii grid");
  for (double r : radii)
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("weierstrass_scan: radii must be positive");

  const auto us = sphere_grid(model.m(), resolution);
  const auto vs = sphere_grid(model.d(), resolution);
  const Mat p = model.piola(f);  // throws on the tie set

  ScanResult best;
  best.min_value = std::numeric_limits<double>::infinity();
  const std::size_t per_u = vs.size() * radii.size();
  best.evaluations = us.size() * per_u;

  if (model.has_wells()) {
    // g = r v in global coordinates, one table per u.
    std::vector<Vec> basis;
    for (std::size_t i = 0; i < model.d(); ++i) {
      Vec e(model.d(), 0.0);
      e[i] = 1.0;
      basis.push_back(std::move(e));
    }
    std::vector<Vec> g(model.d(), Vec(per_u));
    for (std::size_t iv = 0; iv < vs.size(); ++iv)
      for (std::size_t ir = 0; ir < radii.size(); ++ir)
        for (std::size_t i = 0; i < model.d(); ++i) g[i][iv * radii.size() + ir] = radii[ir] * vs[iv][i];
    const std::vector<std::int32_t> side(per_u, 0);
    kernels::Batch batch;
    for (std::size_t i = 0; i < model.d(); ++i) batch.g[i] = g[i];
    batch.side = side;
    Vec out(per_u);

    for (std::size_t iu = 0; iu < us.size(); ++iu) {
      const Mat states[1] = {f};
      const Vec shears[1] = {us[iu].vec()};
      kernels::RankOneTable table = kernels::make_table(model, states, shears, basis, false);
      const Vec pt = apply_transpose(p, us[iu].vec());
      for (std::size_t i = 0; i < model.d(); ++i) table.lin[0][i] = table.lin[1][i] = pt[i];
      kernels::rank_one_increment(table, 1.0, 1.0, batch, out);
      for (std::size_t k = 0; k < per_u; ++k) {
        if (out[k] < best.min_value) {
          best.min_value = out[k];
          best.u = us[iu].vec();
          best.v = vs[k / radii.size()].vec();
          best.r = radii[k % radii.size()];
        }
      }
    }
    return best;
  }

  const double w0 = model.eval(f);
  for (const auto& u : us) {
    for (const auto& v : vs) {
      const Mat dir = outer(u.vec(), v.vec());
      const double pd = frobenius(p, dir);
      for (double r : radii) {
        const double value = model.eval(f + r * dir) - w0 - r * pd;
        if (value < best.min_value) {
          best.min_value = value;
          best.u = u.vec();
          best.v = v.vec();
          best.r = r;
        }
      }
    }
  }
  return best;
}

double normality_gap(const EnergyModel& model, const InterfacePair& pair) {
  return interchange_force(model, pair) - 2.0 * std::abs(maxwell_force(model, pair));
}

TaylorResidual taylor_residual(const EnergyModel& model, const InterfacePair& pair,
                               std::span<const double> xi, std::span<const double> eta) {
  if (xi.size() != model.m() || eta.size() != model.d())
    throw DimensionError("taylor_residual: xi must have length m and eta length d");
  const Stresses s = stresses(model, pair);
  const Mat jp = s.jump();
  const double p_star = maxwell_force(model, pair);
  const double n_force = frobenius(jp, pair.jump());

  Vec a_xi(pair.a);
  for (std::size_t i = 0; i < a_xi.size(); ++i) a_xi[i] += xi[i];
  Vec n_eta(pair.n.vec());
  for (std::size_t j = 0; j < n_eta.size(); ++j) n_eta[j] += eta[j];
  const Mat h = outer(a_xi, n_eta);

  const double linear = dot(gradjump::apply(jp, pair.n.vec()), xi) + dot(apply_transpose(jp, pair.a), eta);
  TaylorResidual out{};
  out.lhs_plus = model.weierstrass_excess(pair.fp, -h);
  out.rhs_plus = -p_star + 0.5 * n_force + linear;
  out.lhs_minus = model.weierstrass_excess(pair.fm, h);
  out.rhs_minus = p_star + 0.5 * n_force + linear;
  return out;
}

JumpDiagnostics diagnose(const EnergyModel& model, const InterfacePair& pair,
                         const DiagnosticOptions& options) {
  JumpDiagnostics d;
  const Stresses s = stresses(model, pair);
  d.p_star = maxwell_force(model, pair);
  d.frak_n = interchange_force(model, pair);
  d.traction_residual = traction_residual(model, pair);
  d.roughening_residual = roughening_residual(model, pair);
  d.normality_gap = d.frak_n - 2.0 * std::abs(d.p_star);

  const Vec radii = options.radii ? *options.radii : default_scan_radii(frobenius_norm(pair.jump()));
  d.weierstrass_min_plus = weierstrass_scan(model, pair.fp, radii, options.resolution).min_value;
  d.weierstrass_min_minus = weierstrass_scan(model, pair.fm, radii, options.resolution).min_value;

  d.tolerances = options.tol;
  d.stress_scale = frobenius_norm(s.p_plus) + frobenius_norm(s.p_minus);
  d.energy_scale = std::abs(model.eval(pair.fp)) + std::abs(model.eval(pair.fm));
  d.stress_tol = options.tol.bound(d.stress_scale);
  d.energy_tol = options.tol.bound(d.energy_scale);

  d.maxwell_ok = std::abs(d.p_star) <= d.stress_tol;
  d.traction_ok = norm(d.traction_residual) <= d.stress_tol;
  d.roughening_ok = norm(d.roughening_residual) <= d.stress_tol;
  d.interchange_ok = d.frak_n <= d.stress_tol;
  d.weierstrass_ok = std::min(d.weierstrass_min_plus, d.weierstrass_min_minus) >= -d.energy_tol;
  return d;
}

}  // namespace gradjump
