#include "gradjump/envelope.hpp"

#include <cmath>

#include "gradjump/error.hpp"

namespace gradjump {

std::vector<std::size_t> lower_hull_vertices(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionError("lower hull needs >= 2 matching points");
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0 && !(x[i] > x[i - 1])) throw DimensionError("lower hull: x must be strictly increasing");
    while (hull.size() >= 2) {
      const std::size_t o = hull[hull.size() - 2], a = hull.back();
      const double cross = (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o]);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(i);
  }
  return hull;
}

Vec lower_convex_hull(std::span<const double> x, std::span<const double> y) {
  const auto verts = lower_hull_vertices(x, y);
  Vec out(x.size());
  for (std::size_t k = 0; k + 1 < verts.size(); ++k) {
    const std::size_t i0 = verts[k], i1 = verts[k + 1];
    const double slope = (y[i1] - y[i0]) / (x[i1] - x[i0]);
    out[i0] = y[i0];
    for (std::size_t i = i0 + 1; i < i1; ++i) out[i] = y[i0] + (x[i] - x[i0]) * slope;
  }
  out[verts.back()] = y[verts.back()];
  return out;
}

std::vector<AffineSegment> affine_segments(std::span<const double> x, std::span<const double> hull) {
  const auto verts = lower_hull_vertices(x, hull);
  std::vector<AffineSegment> segs;
  for (std::size_t k = 0; k + 1 < verts.size(); ++k) {
    const std::size_t i0 = verts[k], i1 = verts[k + 1];
    const double slope = (hull[i1] - hull[i0]) / (x[i1] - x[i0]);
    if (!segs.empty() && std::abs(segs.back().slope - slope) <= 1e-8 * (1.0 + std::abs(slope))) {
      auto& s = segs.back();
      s.t_end = x[i1];
      s.intervals += i1 - i0;
    } else {
      segs.push_back({x[i0], x[i1], slope, i1 - i0});
    }
  }
  return segs;
}

Vec uniform_grid(std::size_t intervals) {
  if (intervals < 2) throw ConfigError("uniform_grid: need at least two intervals");
  Vec t(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) t[i] = static_cast<double>(i) / static_cast<double>(intervals);
  return t;
}

EnvelopeCurve rank_one_restriction(const EnergyModel& model, const InterfacePair& pair,
                                   std::span<const double> t_grid) {
  if (t_grid.size() < 3) throw ConfigError("rank_one_restriction: grid needs at least three points");
  if (t_grid.front() < 0.0 || t_grid.back() > 1.0) throw ConfigError("rank_one_restriction: grid must lie in [0, 1]");
  EnvelopeCurve curve;
  curve.t_grid.assign(t_grid.begin(), t_grid.end());
  curve.w_values.reserve(t_grid.size());
  for (double t : t_grid) curve.w_values.push_back(model.eval(t * pair.fp + (1.0 - t) * pair.fm));
  curve.hull_values = lower_convex_hull(curve.t_grid, curve.w_values);
  curve.affine_segments = affine_segments(curve.t_grid, curve.hull_values);
  return curve;
}

double one_sided_slope(const EnvelopeCurve& curve, Endpoint at) {
  const auto& t = curve.t_grid;
  const auto& h = curve.hull_values;
  const std::size_t n = t.size();
  if (at == Endpoint::Minus) return (h[1] - h[0]) / (t[1] - t[0]);
  return (h[n - 1] - h[n - 2]) / (t[n - 1] - t[n - 2]);
}

DirectionalDerivative directional_derivative(const EnergyModel& model, const InterfacePair& pair,
                                             Endpoint at, const DerivativeOptions& options) {
  DirectionalDerivative out;
  const Mat& f_end = at == Endpoint::Minus ? pair.fm : pair.fp;
  out.expected = frobenius(model.piola(f_end), pair.jump());

  std::size_t intervals = options.initial_intervals;
  double prev_slope = one_sided_slope(rank_one_restriction(model, pair, uniform_grid(intervals)), at);
  double prev_extrap = prev_slope;
  for (std::size_t level = 1; level <= options.max_levels; ++level) {
    intervals *= 2;
    const double slope = one_sided_slope(rank_one_restriction(model, pair, uniform_grid(intervals)), at);
    const double extrap = 2.0 * slope - prev_slope;
    out.change = std::abs(extrap - prev_extrap);
    out.value = extrap;
    out.intervals = intervals;
    if (level >= 2 && out.change <= options.tol * (1.0 + std::abs(extrap))) return out;
    prev_slope = slope;
    prev_extrap = extrap;
  }
  throw NonconvergenceError("directional_derivative: no convergence after " +
                            std::to_string(options.max_levels) + " refinements (last change " +
                            std::to_string(out.change) + ")");
}

AffineReport check_affine_formula(const EnergyModel& model, const InterfacePair& pair, double tol,
                                  std::size_t intervals) {
  const EnvelopeCurve curve = rank_one_restriction(model, pair, uniform_grid(intervals));
  const double wp = curve.w_values.back();
  const double wm = curve.w_values.front();
  AffineReport r;
  r.tol = tol;
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    const double t = curve.t_grid[i];
    const double dev = std::abs(curve.hull_values[i] - (t * wp + (1.0 - t) * wm));
    if (dev > r.max_deviation) {
      r.max_deviation = dev;
      r.t_at_max = t;
    }
  }
  r.pass = r.max_deviation <= tol;
  return r;
}

double PlasticMechanism::signed_distance(const Mat& p) const {
  return (frobenius(p, yield_normal) - yield_offset) / frobenius_norm(yield_normal);
}

PlasticMechanism yield_plane(const EnergyModel& model, const InterfacePair& pair, double tol) {
  PlasticMechanism m;
  m.pair = pair;
  m.yield_normal = pair.jump();
  m.yield_offset = model.eval(pair.fp) - model.eval(pair.fm);
  const Mat pp = model.piola(pair.fp);
  const Mat pm = model.piola(pair.fm);
  m.gap_plus = frobenius(pp, m.yield_normal) - m.yield_offset;
  m.gap_minus = frobenius(pm, m.yield_normal) - m.yield_offset;
  m.frak_n = m.gap_plus - m.gap_minus;
  m.normality = std::abs(m.frak_n) <= tol * (1.0 + frobenius_norm(pp) + frobenius_norm(pm));
  m.origin_distance = std::abs(m.yield_offset) / frobenius_norm(m.yield_normal);
  return m;
}

StrainRateSplit strain_rate_split(const LaminateState& state, double dtheta, const Mat& dfp,
                                  const Mat& dfm) {
  if (!dfp.same_shape(state.fp) || !dfm.same_shape(state.fm))
    throw DimensionError("strain_rate_split: rate shapes differ from the laminate");
  return {state.theta * dfp + (1.0 - state.theta) * dfm, dtheta * (state.fp - state.fm)};
}

}  // namespace gradjump
