#include "gradjump/interchange.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "gradjump/error.hpp"
#include "gradjump/kernels.hpp"

namespace gradjump {

Cutoffs cutoffs(double h, double s) {
  const double sh = std::sqrt(h);
  Cutoffs c{};
  c.phi = s <= 0.0 ? 1.0 : (s >= 1.0 ? 0.0 : 1.0 - s);
  c.rho = std::clamp(s, 0.0, 1.0);
  c.zeta = s <= 1.0 - sh ? 1.0 : (s >= 1.0 ? 0.0 : (1.0 - s) / sh);
  return c;
}

std::string to_string(Region r) {
  switch (r) {
    case Region::RPlus: return "R_plus";
    case Region::RMinus: return "R_minus";
    case Region::Q: return "Q";
    case Region::QPrime: return "Q_prime";
    case Region::SupportComplement: return "support_complement";
  }
  return "unknown";
}

std::string to_string(Stratum s) {
  switch (s) {
    case Stratum::Slab: return "slab";
    case Stratum::Strip: return "strip";
    case Stratum::Ring: return "ring";
    case Stratum::Bulk: return "bulk";
  }
  return "unknown";
}

Stratum stratum_from_string(const std::string& s) {
  for (auto st : {Stratum::Slab, Stratum::Strip, Stratum::Ring, Stratum::Bulk})
    if (to_string(st) == s) return st;
  throw ConfigError("unknown stratum '" + s + "'");
}

UnitVector default_tangent(const UnitVector& n) {
  const Vec& v = n.vec();
  if (v.size() == 2) return UnitVector(Vec{-v[1], v[0]});
  if (v.size() == 3) {
    // Cross with the coordinate axis least aligned with n.
    std::size_t k = 0;
    for (std::size_t i = 1; i < 3; ++i)
      if (std::abs(v[i]) < std::abs(v[k])) k = i;
    Vec e(3, 0.0);
    e[k] = 1.0;
    return UnitVector(Vec{v[1] * e[2] - v[2] * e[1], v[2] * e[0] - v[0] * e[2],
                          v[0] * e[1] - v[1] * e[0]});
  }
  throw DimensionError("interchange field needs d = 2 or 3");
}

InterchangeParams InterchangeParams::make(const InterfacePair& pair, double h, double t,
                                          std::optional<UnitVector> nu, QuadratureConfig quad) {
  InterchangeParams p;
  p.h = h;
  p.t = t;
  p.nu = nu ? *nu : default_tangent(pair.n);
  p.quad = std::move(quad);
  p.validate(pair);
  return p;
}

void InterchangeParams::validate(const InterfacePair& pair) const {
  if (!(h > 0.0 && h < 1.0)) throw ConfigError("interchange: h must lie in (0, 1)");
  if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("interchange: t must lie in [0, 1]");
  if (pair.n.dim() < 2 || pair.n.dim() > 3) throw DimensionError("interchange field needs d = 2 or 3");
  if (nu.dim() != pair.n.dim()) throw DimensionError("interchange: nu has wrong dimension");
  if (std::abs(dot(nu.vec(), pair.n.vec())) > 1e-12) throw ConfigError("interchange: nu must be orthogonal to n");
  if (quad.samples_slab < 1000 || quad.samples_bulk < 1000)
    throw ConfigError("interchange: sample counts must be at least 1000");
  if (quad.stratification.empty()) throw ConfigError("interchange: empty stratification");
}

namespace {

struct Frame {
  std::size_t d;
  Vec n, nu, e3;

  Frame(const InterfacePair& pair, const InterchangeParams& params)
      : d(pair.n.dim()), n(pair.n.vec()), nu(params.nu.vec()) {
    if (d == 3) {
      e3 = {n[1] * nu[2] - n[2] * nu[1], n[2] * nu[0] - n[0] * nu[2], n[0] * nu[1] - n[1] * nu[0]};
    }
  }

  std::vector<Vec> basis() const {
    std::vector<Vec> b{n, nu};
    if (d == 3) b.push_back(e3);
    return b;
  }

  Vec to_global(double c, double s, double e) const {
    Vec z(d);
    for (std::size_t i = 0; i < d; ++i) z[i] = c * n[i] + s * nu[i] + (d == 3 ? e * e3[i] : 0.0);
    return z;
  }
};

struct LocalGrad {
  double value = 0.0;
  double gn = 0.0, gs = 0.0, ge = 0.0;
};

// psi(z) = h phi(c/h) rho(s/sqrt h) zeta_h(r) and its gradient in (n, nu, e3).
// Kinks take the one-sided value that makes the derivative vanish.
LocalGrad psi(double h, double sh, double c, double s, double e, double r) {
  const double x = c / h;
  const double phi = x <= 0.0 ? 1.0 : (x >= 1.0 ? 0.0 : 1.0 - x);
  const double dphi = (x > 0.0 && x < 1.0) ? -1.0 : 0.0;
  const double y = s / sh;
  const double rho = std::clamp(y, 0.0, 1.0);
  const double drho = (y > 0.0 && y < 1.0) ? 1.0 : 0.0;
  const double zeta = r <= 1.0 - sh ? 1.0 : (r >= 1.0 ? 0.0 : (1.0 - r) / sh);
  const double dzeta = (r > 1.0 - sh && r < 1.0) ? -1.0 / sh : 0.0;

  LocalGrad g;
  g.value = h * phi * rho * zeta;
  if (g.value == 0.0 && dphi == 0.0 && drho == 0.0) return g;
  g.gn = dphi * rho * zeta;
  g.gs = h * phi * drho / sh * zeta;
  const double radial = h * phi * rho * dzeta;
  if (radial != 0.0 && r > 0.0) {
    g.gn += radial * c / r;
    g.gs += radial * s / r;
    g.ge = radial * e / r;
  }
  return g;
}

LocalGrad interchange_gradient(double h, double sh, double c, double s, double e, double r) {
  const LocalGrad p = psi(h, sh, c, s, e, r);
  const LocalGrad m = psi(h, sh, -c, -s, -e, r);
  // d/dz [psi(-z)] = -(grad psi)(-z)
  return {p.value + m.value, p.gn - m.gn, p.gs - m.gs, p.ge - m.ge};
}

Region classify_local(double h, double sh, double c, double s, double r) {
  if (r >= 1.0) return Region::SupportComplement;
  const double inner = 1.0 - sh;
  if (r < inner && 0.0 < c && c < h && s > sh) return Region::RPlus;
  if (r < inner && 0.0 < -c && -c < h && -s > sh) return Region::RMinus;
  const double sc = s * c;
  if (sc < 0.0 && (r > inner || (std::abs(s) < sh && r < inner))) return Region::Q;
  if (sc > 0.0 && std::abs(c) < h && (std::abs(s) < sh || r > inner)) return Region::QPrime;
  return Region::SupportComplement;
}

enum class Integrand { Increment, FirstVariation };

struct Context {
  const EnergyModel& model;
  const InterfacePair& pair;
  const InterchangeParams& params;
  Frame frame;
  Integrand integrand;
  std::optional<kernels::RankOneTable> table;
  Mat p_plus, p_minus;  // generic first variation
  double w_plus = 0.0, w_minus = 0.0;
  std::array<bool, 4> enabled{};
  double h, sh;
};

struct StratumSums {
  double sum = 0.0;
  double var = 0.0;
  std::array<double, 4> region_sum{};
  std::array<double, 4> region_var{};
  double volume = 0.0;
  std::size_t cells = 0;
  std::size_t samples = 0;
};

constexpr std::size_t kChunkCells = 2048;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bool in_stratum(const Context& ctx, Stratum st, double c, double s, double r) {
  switch (st) {
    case Stratum::Slab: return std::abs(c) < ctx.h;
    case Stratum::Strip: return std::abs(s) < ctx.sh;
    case Stratum::Ring: return r > 1.0 - ctx.sh;
    case Stratum::Bulk: return true;
  }
  return false;
}

// Sample i of stratum st lies in st's region and in none of the enabled
// strata that precede it.
bool accept(const Context& ctx, Stratum st, double c, double s, double r) {
  if (r >= 1.0) return false;
  for (int k = 0; k < static_cast<int>(st); ++k)
    if (ctx.enabled[k] && in_stratum(ctx, static_cast<Stratum>(k), c, s, r)) return false;
  return in_stratum(ctx, st, c, s, r);
}

StratumSums run_stratum(const Context& ctx, Stratum st, std::size_t budget, std::size_t level) {
  const std::size_t d = ctx.frame.d;
  const double h = ctx.h;
  const double sh = ctx.sh;
  const double t = ctx.params.t;

  StratumSums out;
  std::size_t k = static_cast<std::size_t>(std::floor(std::pow(0.5 * static_cast<double>(budget), 1.0 / static_cast<double>(d))));
  while (k > 1 && std::pow(static_cast<double>(k), static_cast<double>(d)) * 2.0 > static_cast<double>(budget)) --k;
  k = std::max<std::size_t>(k, 1);
  std::size_t cells = 1;
  for (std::size_t i = 0; i < d; ++i) cells *= k;
  out.cells = cells;
  out.samples = 2 * cells;

  const double box_side = std::pow(2.0, static_cast<double>(d - 1));
  const double inner = 1.0 - sh;
  switch (st) {
    case Stratum::Slab: out.volume = 2.0 * h * box_side; break;
    case Stratum::Strip: out.volume = 2.0 * sh * box_side; break;
    case Stratum::Ring:
      out.volume = unit_ball_volume(d) * (1.0 - std::pow(inner, static_cast<double>(d)));
      break;
    case Stratum::Bulk: out.volume = 2.0 * box_side; break;
  }

  const std::uint64_t seed = ctx.params.quad.seed;
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(st) + 1u, static_cast<std::uint32_t>(level)};
  std::mt19937_64 rng(seq);

  const std::size_t chunk_points = 2 * kChunkCells;
  std::array<Vec, 3> g{Vec(chunk_points), Vec(chunk_points), Vec(chunk_points)};
  std::vector<std::int32_t> side(chunk_points);
  std::vector<signed char> region(chunk_points);
  std::vector<unsigned char> inside(chunk_points);
  Vec values(chunk_points);
  const double inner_d = std::pow(inner, static_cast<double>(d));

  for (std::size_t cell0 = 0; cell0 < cells; cell0 += kChunkCells) {
    const std::size_t ncell = std::min(kChunkCells, cells - cell0);
    const std::size_t npts = 2 * ncell;
    for (std::size_t j = 0; j < npts; ++j) {
      std::size_t id = cell0 + j / 2;
      double u[3] = {0.0, 0.0, 0.0};
      for (std::size_t i = 0; i < d; ++i) {
        const std::size_t digit = id % k;
        id /= k;
        u[i] = (static_cast<double>(digit) + uniform01(rng)) / static_cast<double>(k);
      }
      double c = 0.0, s = 0.0, e = 0.0;
      switch (st) {
        case Stratum::Slab:
          c = h * (2.0 * u[0] - 1.0);
          s = 2.0 * u[1] - 1.0;
          if (d == 3) e = 2.0 * u[2] - 1.0;
          break;
        case Stratum::Strip:
          s = sh * (2.0 * u[0] - 1.0);
          c = 2.0 * u[1] - 1.0;
          if (d == 3) e = 2.0 * u[2] - 1.0;
          break;
        case Stratum::Ring: {
          const double rr = std::pow(inner_d + u[0] * (1.0 - inner_d), 1.0 / static_cast<double>(d));
          if (d == 2) {
            const double ang = 2.0 * std::numbers::pi * u[1];
            c = rr * std::cos(ang);
            s = rr * std::sin(ang);
          } else {
            const double w = 2.0 * u[1] - 1.0;
            const double rad = std::sqrt(std::max(0.0, 1.0 - w * w));
            const double ang = 2.0 * std::numbers::pi * u[2];
            c = rr * w;
            s = rr * rad * std::cos(ang);
            e = rr * rad * std::sin(ang);
          }
          break;
        }
        case Stratum::Bulk:
          c = 2.0 * u[0] - 1.0;
          s = 2.0 * u[1] - 1.0;
          if (d == 3) e = 2.0 * u[2] - 1.0;
          break;
      }
      const double r = std::sqrt(c * c + s * s + e * e);
      const bool ok = accept(ctx, st, c, s, r);
      inside[j] = ok;
      if (ok) {
        const LocalGrad lg = interchange_gradient(h, sh, c, s, e, r);
        g[0][j] = lg.gn;
        g[1][j] = lg.gs;
        g[2][j] = lg.ge;
        side[j] = c > 0.0 ? 0 : 1;
        region[j] = static_cast<signed char>(classify_local(h, sh, c, s, r));
      } else {
        g[0][j] = g[1][j] = g[2][j] = 0.0;
        side[j] = 0;
        region[j] = -1;
      }
    }

    if (ctx.table && ctx.integrand == Integrand::Increment) {
      kernels::Batch batch;
      for (std::size_t i = 0; i < d; ++i) batch.g[i] = std::span<const double>(g[i].data(), npts);
      batch.side = std::span<const std::int32_t>(side.data(), npts);
      kernels::rank_one_increment(*ctx.table, t, 0.0, batch, std::span<double>(values.data(), npts));
    } else {
      for (std::size_t j = 0; j < npts; ++j) {
        values[j] = 0.0;
        if (!inside[j] || (g[0][j] == 0.0 && g[1][j] == 0.0 && g[2][j] == 0.0)) continue;
        const bool plus = side[j] == 0;
        if (ctx.integrand == Integrand::FirstVariation) {
          if (ctx.table) {
            const double* lin = ctx.table->lin[plus ? 0 : 1];
            double acc = lin[0] * g[0][j];
            for (std::size_t i = 1; i < d; ++i) acc += lin[i] * g[i][j];
            values[j] = acc;
          } else {
            const Vec gz = ctx.frame.to_global(g[0][j], g[1][j], g[2][j]);
            values[j] = frobenius(plus ? ctx.p_plus : ctx.p_minus, outer(ctx.pair.a, gz));
          }
        } else {
          const Vec gz = ctx.frame.to_global(g[0][j], g[1][j], g[2][j]);
          const Mat& base = plus ? ctx.pair.fp : ctx.pair.fm;
          values[j] = ctx.model.eval(base + t * outer(ctx.pair.a, gz)) -
                      (plus ? ctx.w_plus : ctx.w_minus);
        }
      }
    }

    for (std::size_t j = 0; j < npts; j += 2) {
      const double f1 = inside[j] ? values[j] : 0.0;
      const double f2 = inside[j + 1] ? values[j + 1] : 0.0;
      out.sum += f1 + f2;
      out.var += (f1 - f2) * (f1 - f2);
      for (int q = 0; q < 4; ++q) {
        const double i1 = region[j] == q ? 1.0 : 0.0;
        const double i2 = region[j + 1] == q ? 1.0 : 0.0;
        out.region_sum[q] += i1 + i2;
        out.region_var[q] += (i1 - i2) * (i1 - i2);
      }
    }
  }
  return out;
}

VariationResult integrate(const EnergyModel& model, const InterfacePair& pair,
                          const InterchangeParams& params, Integrand integrand) {
  params.validate(pair);
  if (model.m() != pair.fp.rows() || model.d() != pair.fp.cols())
    throw DimensionError("interchange: model and pair shapes differ");

  Context ctx{model, pair, params, Frame(pair, params), integrand, std::nullopt, {}, {}, 0.0, 0.0,
              {}, params.h, std::sqrt(params.h)};
  for (Stratum st : params.quad.stratification) ctx.enabled[static_cast<int>(st)] = true;
  const bool linear = integrand == Integrand::FirstVariation;
  if (model.has_wells()) {
    const Mat states[2] = {pair.fp, pair.fm};
    const Vec shears[2] = {pair.a, pair.a};
    const auto basis = ctx.frame.basis();
    ctx.table = kernels::make_table(model, states, shears, basis, linear);
  } else {
    ctx.w_plus = model.eval(pair.fp);
    ctx.w_minus = model.eval(pair.fm);
    if (linear) {
      ctx.p_plus = model.piola(pair.fp);
      ctx.p_minus = model.piola(pair.fm);
    }
  }

  std::vector<Stratum> strata;
  for (int k = 0; k < 4; ++k)
    if (ctx.enabled[k]) strata.push_back(static_cast<Stratum>(k));

  for (std::size_t level = 0;; ++level) {
    const std::size_t factor = std::size_t{1} << level;
    std::vector<std::future<StratumSums>> jobs;
    for (Stratum st : strata) {
      const std::size_t budget =
          factor * (st == Stratum::Slab ? params.quad.samples_slab : params.quad.samples_bulk);
      jobs.push_back(std::async(std::launch::async, run_stratum, std::cref(ctx), st, budget, level));
    }

    VariationResult res;
    double var = 0.0;
    std::array<double, 4> rvar{};
    std::array<double, 4> rval{};
    for (auto& job : jobs) {
      const StratumSums s = job.get();
      const double nc = static_cast<double>(s.cells);
      const double scale = s.volume / (2.0 * nc);
      res.delta_e += scale * s.sum;
      var += (s.volume * s.volume) / (nc * nc) * 0.25 * s.var;
      for (int q = 0; q < 4; ++q) {
        rval[q] += scale * s.region_sum[q];
        rvar[q] += (s.volume * s.volume) / (nc * nc) * 0.25 * s.region_var[q];
      }
      res.samples += s.samples;
    }
    res.mc_error = std::sqrt(var);
    for (int q = 0; q < 4; ++q)
      res.region_measures[static_cast<Region>(q)] = Estimate{rval[q], std::sqrt(rvar[q])};

    if (res.mc_error <= params.quad.max_error) return res;
    if (level >= params.quad.max_refinements) {
      throw QuadratureError("quadrature error " + std::to_string(res.mc_error) +
                            " above cap " + std::to_string(params.quad.max_error) + " after " +
                            std::to_string(res.samples) + " samples");
    }
  }
}

// Weighted least squares y = b0 + b1 x. Returns coefficients, covariance and
// the intercept's linear weights (intercept = sum_i w_i y_i).
struct LineFit {
  double b0 = 0.0, b1 = 0.0;
  double var_b0 = 0.0;
  double chi2 = 0.0;
  Vec intercept_weights;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> sigma) {
  const std::size_t n = x.size();
  double s = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
  Vec w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sig = std::max(sigma[i], 1e-15 * (1.0 + std::abs(y[i])));
    w[i] = 1.0 / (sig * sig);
    s += w[i];
    sx += w[i] * x[i];
    sxx += w[i] * x[i] * x[i];
    sy += w[i] * y[i];
    sxy += w[i] * x[i] * y[i];
  }
  const double det = s * sxx - sx * sx;
  if (!(std::abs(det) > 0.0)) throw NonconvergenceError("fit_line: singular design");
  LineFit f;
  f.b0 = (sxx * sy - sx * sxy) / det;
  f.b1 = (s * sxy - sx * sy) / det;
  f.var_b0 = sxx / det;
  f.intercept_weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.intercept_weights[i] = w[i] * (sxx - sx * x[i]) / det;
    const double r = y[i] - f.b0 - f.b1 * x[i];
    f.chi2 += w[i] * r * r;
  }
  return f;
}

// Extrapolates y(x) linearly to x = 0. The error bound sum |w_i| sigma_i stays
// valid when the y_i share random numbers.
Estimate extrapolate_to_zero(std::span<const double> x, std::span<const double> y,
                             std::span<const double> sigma) {
  const LineFit f = fit_line(x, y, sigma);
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) err += std::abs(f.intercept_weights[i]) * sigma[i];
  return {f.b0, err};
}

}  // namespace

FieldValue field(const InterfacePair& pair, const InterchangeParams& params, std::span<const double> z) {
  params.validate(pair);
  const Frame fr(pair, params);
  if (z.size() != fr.d) throw DimensionError("field: point has wrong dimension");
  const double c = dot(z, fr.n);
  const double s = dot(z, fr.nu);
  const double e = fr.d == 3 ? dot(z, fr.e3) : 0.0;
  const double r = norm(z);
  const double sh = std::sqrt(params.h);
  const LocalGrad lg = interchange_gradient(params.h, sh, c, s, e, r);
  return {scaled(pair.a, lg.value), outer(pair.a, fr.to_global(lg.gn, lg.gs, lg.ge))};
}

Region classify_region(const InterfacePair& pair, const InterchangeParams& params,
                       std::span<const double> z) {
  params.validate(pair);
  const Frame fr(pair, params);
  if (z.size() != fr.d) throw DimensionError("classify_region: point has wrong dimension");
  return classify_local(params.h, std::sqrt(params.h), dot(z, fr.n), dot(z, fr.nu), norm(z));
}

VariationResult energy_increment(const EnergyModel& model, const InterfacePair& pair,
                                 const InterchangeParams& params) {
  return integrate(model, pair, params, Integrand::Increment);
}

VariationResult first_variation(const EnergyModel& model, const InterfacePair& pair,
                                const InterchangeParams& params) {
  return integrate(model, pair, params, Integrand::FirstVariation);
}

std::vector<CurvePoint> d_path(const EnergyModel& model, const InterfacePair& pair,
                               std::span<const double> t_grid) {
  const Mat jump = pair.jump();
  const double n_force = interchange_force(model, pair);
  std::vector<CurvePoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const double value = model.weierstrass_excess(pair.fp, -t * jump) +
                         model.weierstrass_excess(pair.fm, t * jump) - 2.0 * t * n_force;
    out.push_back({t, value});
  }
  return out;
}

double increment_limit_target(const EnergyModel& model, const InterfacePair& pair, double t) {
  const double ts[1] = {t};
  return 0.5 * unit_ball_volume(pair.n.dim() - 1) * d_path(model, pair, ts).front().value;
}

LimitFit fit_sqrt_h(std::vector<LimitPoint> points, double residual_threshold) {
  if (points.size() < 4) throw ConfigError("limit fit needs at least four h values");
  const std::size_t n = points.size();
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sig = std::max(points[i].error, 1e-15 * (1.0 + std::abs(points[i].value)));
    const double h = points[i].h;
    design.row(static_cast<Eigen::Index>(i)) << 1.0 / sig, std::sqrt(h) / sig, h / sig;
    rhs(static_cast<Eigen::Index>(i)) = points[i].value / sig;
  }
  const Eigen::Matrix3d normal = design.transpose() * design;
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
  if (!lu.isInvertible()) throw NonconvergenceError("limit fit: singular design (repeated h values?)");
  const Eigen::Vector3d beta = lu.solve(design.transpose() * rhs);
  const Eigen::Matrix3d cov = lu.inverse();

  LimitFit fit;
  fit.limit = beta(0);
  fit.slope = beta(1);
  fit.curvature = beta(2);
  const double chi2 = (design * beta - rhs).squaredNorm();
  const double dof = static_cast<double>(n) - 3.0;
  fit.limit_error = std::sqrt(cov(0, 0) * std::max(1.0, chi2 / dof));

  double ss = 0.0;
  bool same_sign = true;
  Vec lx(n), ly(n);
  const double first = points.front().value - fit.limit;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = points[i].h;
    const double dev = points[i].value - fit.limit;
    const double r = dev - fit.slope * std::sqrt(h) - fit.curvature * h;
    ss += r * r;
    same_sign = same_sign && dev * first > 0.0;
    lx[i] = std::log(h);
    ly[i] = std::log(std::abs(dev));
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(n));
  fit.converged = fit.residual_rms <= residual_threshold;
  if (same_sign) {
    const Vec ones(n, 1.0);
    fit.rate = fit_line(lx, ly, ones).b1;
  } else {
    fit.rate = std::numeric_limits<double>::quiet_NaN();
    fit.converged = false;
  }
  fit.points = std::move(points);
  return fit;
}

LimitFit limit_sweep(const EnergyModel& model, const InterfacePair& pair,
                     const InterchangeParams& params, std::span<const double> h_grid,
                     double residual_threshold) {
  if (h_grid.size() < 4) throw ConfigError("limit_sweep: h grid needs at least four points");
  for (std::size_t i = 1; i < h_grid.size(); ++i)
    if (!(h_grid[i] < h_grid[i - 1])) throw ConfigError("limit_sweep: h grid must be decreasing");
  std::vector<LimitPoint> pts;
  for (double h : h_grid) {
    InterchangeParams p = params;
    p.h = h;
    const VariationResult r = energy_increment(model, pair, p);
    pts.push_back({h, r.delta_e / h, r.mc_error / h});
  }
  LimitFit fit = fit_sqrt_h(std::move(pts), residual_threshold);
  fit.target = increment_limit_target(model, pair, params.t);
  return fit;
}

CommutationResult limit_commutation(const EnergyModel& model, const InterfacePair& pair,
                                    const InterchangeParams& params,
                                    std::span<const double> h_grid,
                                    std::span<const double> t_grid) {
  if (t_grid.size() < 2) throw ConfigError("limit_commutation: t grid needs at least two points");
  for (double t : t_grid)
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("limit_commutation: t values must lie in (0, 1]");

  CommutationResult out;
  out.target = -unit_ball_volume(pair.n.dim() - 1) * interchange_force(model, pair);

  // lim_h lim_t: same seed for every t, so the t-extrapolation sees common
  // random numbers.
  for (double h : h_grid) {
    Vec ys, sig;
    for (double t : t_grid) {
      InterchangeParams p = params;
      p.h = h;
      p.t = t;
      const VariationResult r = energy_increment(model, pair, p);
      ys.push_back(r.delta_e / (t * h));
      sig.push_back(r.mc_error / (t * h));
    }
    const Estimate e = extrapolate_to_zero(t_grid, ys, sig);
    out.t_first.push_back({h, e.value, e.error});
  }
  out.t_first_fit = fit_sqrt_h(out.t_first);
  out.t_first_fit.target = out.target;

  // lim_t lim_h
  Vec ts, ys, sig;
  for (double t : t_grid) {
    InterchangeParams p = params;
    p.t = t;
    const LimitFit f = limit_sweep(model, pair, p, h_grid);
    out.h_first.push_back({t, f.limit / t, f.limit_error / t});
    ts.push_back(t);
    ys.push_back(f.limit / t);
    sig.push_back(f.limit_error / t);
  }
  const Estimate e = extrapolate_to_zero(ts, ys, sig);
  out.h_first_limit = e.value;
  out.h_first_error = e.error;
  return out;
}

IsotropicPath d_path_isotropic(const IsotropicParams& params, double theta_plus,
                               double theta_minus, std::span<const double> t_grid) {
  const Polynomial& f = params.f;
  const double dtheta = theta_plus - theta_minus;
  const double dfp = f.derivative(theta_plus) - f.derivative(theta_minus);
  const double k = 2.0 * params.mu * (1.0 - 1.0 / static_cast<double>(params.d));
  const double dphi = dfp + k * dtheta;

  IsotropicPath out;
  out.constraint_value = dphi * dtheta;
  out.constraint_ok = out.constraint_value <= 0.0;
  const double base = f(theta_plus) + f(theta_minus);
  for (double t : t_grid) {
    const double th = t * theta_plus + (1.0 - t) * theta_minus;
    const double tl = (1.0 - t) * theta_plus + t * theta_minus;
    out.curve.push_back({t, f(th) + f(tl) - base + t * (1.0 - t) * dfp * dtheta});
  }
  return out;
}

}  // namespace gradjump
