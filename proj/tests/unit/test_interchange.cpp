#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gradjump/error.hpp"
#include "gradjump/interchange.hpp"

using namespace gradjump;

namespace {

const EnergyModel kAntiplane = EnergyModel::antiplane({});
const InterfacePair kEquilibrium = InterfacePair::make(Mat{{1, 0}}, Mat{{2, 0}});
const InterfacePair kNonEquilibrium = InterfacePair::make(Mat{{1, 0}}, Mat{{2.2, 0}});

QuadratureConfig quad(std::uint64_t seed, std::size_t slab, std::size_t bulk) {
  QuadratureConfig q;
  q.seed = seed;
  q.samples_slab = slab;
  q.samples_bulk = bulk;
  return q;
}

// Deterministic midpoint rule on a grid aligned with the slab and the strip.
// Independent of the library's stratified sampler.
double grid_increment(const EnergyModel& model, const InterfacePair& pair, const InterchangeParams& p,
                      std::size_t nc, std::size_t ns) {
  const double h = p.h, sh = std::sqrt(h);
  auto axis = [](std::vector<std::pair<double, double>> pieces, std::size_t per) {
    std::vector<std::pair<double, double>> nodes;  // (midpoint, weight)
    for (auto [a, b] : pieces)
      for (std::size_t i = 0; i < per; ++i) nodes.push_back({a + (b - a) * (i + 0.5) / per, (b - a) / per});
    return nodes;
  };
  const auto cs = axis({{-1, -h}, {-h, 0}, {0, h}, {h, 1}}, nc);
  const auto ss = axis({{-1, -sh}, {-sh, 0}, {0, sh}, {sh, 1}}, ns);
  double total = 0.0;
  for (auto [c, wc] : cs) {
    for (auto [s, ws] : ss) {
      const Vec z{c * pair.n[0] + s * p.nu[0], c * pair.n[1] + s * p.nu[1]};
      if (norm(z) >= 1.0) continue;
      const Mat g = c > 0.0 ? pair.fp : pair.fm;
      const FieldValue fv = field(pair, p, z);
      total += wc * ws * (model.eval(g + p.t * fv.gradient) - model.eval(g));
    }
  }
  return total;
}

double exact_r_plus_area(double h) {
  const double sh = std::sqrt(h), inner = 1.0 - sh;
  const int n = 200000;
  double a = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = h * (i + 0.5) / n;
    a += std::max(0.0, std::sqrt(inner * inner - c * c) - sh) * h / n;
  }
  return a;
}

}  // namespace

TEST_CASE("cutoff examples") {
  CHECK(cutoffs(0.04, -1.0).phi == 1.0);
  CHECK(cutoffs(0.04, 0.5).phi == 0.5);
  CHECK(cutoffs(0.04, 2.0).phi == 0.0);
  for (double h : {0.01, 0.25, 0.81}) {
    CHECK(cutoffs(h, 0.0).zeta == 1.0);
    CHECK(cutoffs(h, 1.0).zeta == 0.0);
    CHECK(cutoffs(h, 1.0 - std::sqrt(h)).zeta == doctest::Approx(1.0));
  }
  CHECK(cutoffs(0.04, 0.5).rho == 0.5);
  CHECK(cutoffs(0.04, -0.5).rho == 0.0);
  CHECK(cutoffs(0.04, 1.5).rho == 1.0);
}

TEST_CASE("field examples") {
  const auto pair = InterfacePair::make(Mat{{0, 1}}, Mat{{0, 2}});
  REQUIRE(pair.n[1] == doctest::Approx(1.0));
  const auto p = InterchangeParams::make(pair, 0.04, 1.0, UnitVector{1.0, 0.0});
  const FieldValue fv = field(pair, p, Vec{0.5, -0.01});
  CHECK(fv.value[0] == doctest::Approx(0.04 * pair.a[0]));

  for (const Vec& z : {Vec{1.0, 0.0}, Vec{0.0, -1.0}, Vec{0.8, 0.7}}) {
    const FieldValue out = field(pair, p, z);
    CHECK(out.value[0] == 0.0);
    CHECK(frobenius_norm(out.gradient) == 0.0);
  }

  // R+: gradient is -[[F]]
  const auto pn = InterchangeParams::make(kNonEquilibrium, 0.04, 1.0);
  const Vec zr{0.02 * kNonEquilibrium.n[0] + 0.5 * pn.nu[0], 0.02 * kNonEquilibrium.n[1] + 0.5 * pn.nu[1]};
  CHECK(classify_region(kNonEquilibrium, pn, zr) == Region::RPlus);
  CHECK(frobenius_norm(field(kNonEquilibrium, pn, zr).gradient + kNonEquilibrium.jump()) <= 1e-14);
}

TEST_CASE("classify_region examples") {
  const auto p = InterchangeParams::make(kNonEquilibrium, 0.01, 1.0);
  const Vec& n = kNonEquilibrium.n.vec();
  const Vec& nu = p.nu.vec();
  auto at = [&](double c, double s) { return Vec{c * n[0] + s * nu[0], c * n[1] + s * nu[1]}; };
  CHECK(classify_region(kNonEquilibrium, p, at(0.005, 0.5)) == Region::RPlus);
  CHECK(classify_region(kNonEquilibrium, p, at(-0.005, -0.5)) == Region::RMinus);
  CHECK(classify_region(kNonEquilibrium, p, at(-0.3, 0.93)) == Region::Q);
  CHECK(classify_region(kNonEquilibrium, p, at(0.3, -0.93)) == Region::Q);
  CHECK(classify_region(kNonEquilibrium, p, at(-0.3, 0.05)) == Region::Q);
  CHECK(classify_region(kNonEquilibrium, p, at(0.005, 0.05)) == Region::QPrime);
  CHECK(classify_region(kNonEquilibrium, p, at(0.005, 0.995)) == Region::QPrime);
  CHECK(classify_region(kNonEquilibrium, p, at(0.5, 0.5)) == Region::SupportComplement);
  CHECK(classify_region(kNonEquilibrium, p, at(0.9, 0.9)) == Region::SupportComplement);
}

TEST_CASE("field gradient matches central differences away from kinks") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto p = InterchangeParams::make(kNonEquilibrium, 0.09, 1.0);
  const double h = p.h, sh = std::sqrt(h);
  const double step = 1e-7;
  int checked = 0;
  while (checked < 400) {
    const Vec z{u(rng), u(rng)};
    const double c = dot(z, kNonEquilibrium.n.vec()), s = dot(z, p.nu.vec()), r = norm(z);
    const double gap = std::min({std::abs(c), std::abs(std::abs(c) - h), std::abs(s), std::abs(std::abs(s) - sh),
                                 std::abs(r - 1.0), std::abs(r - 1.0 + sh)});
    if (gap < 1e-4) continue;
    ++checked;
    const Mat g = field(kNonEquilibrium, p, z).gradient;
    for (std::size_t i = 0; i < 2; ++i) {
      Vec zp = z, zm = z;
      zp[i] += step;
      zm[i] -= step;
      const double fd = (field(kNonEquilibrium, p, zp).value[0] - field(kNonEquilibrium, p, zm).value[0]) / (2 * step);
      CHECK(g(0, i) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("field size bounds: O(h) values, O(1) gradients, O(sqrt h) on Q") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = std::abs(kNonEquilibrium.a[0]);
  for (double h : {0.01, 0.04, 0.16}) {
    const auto p = InterchangeParams::make(kNonEquilibrium, h, 1.0);
    for (int k = 0; k < 20000; ++k) {
      const Vec z{u(rng), u(rng)};
      const FieldValue fv = field(kNonEquilibrium, p, z);
      CHECK(std::abs(fv.value[0]) <= h * a * (1.0 + 1e-12));
      const double gn = frobenius_norm(fv.gradient);
      const Region reg = classify_region(kNonEquilibrium, p, z);
      if (reg == Region::Q) {
        CHECK(gn <= 2.0 * std::sqrt(h) * a);
      } else {
        CHECK(gn <= 3.0 * a);
      }
    }
  }
}

TEST_CASE("region measures against exact areas and their scaling") {
  const double h = 0.01;
  const auto p = InterchangeParams::make(kNonEquilibrium, h, 1.0, std::nullopt, quad(7, 400000, 200000));
  const VariationResult r = energy_increment(kAntiplane, kNonEquilibrium, p);
  const double exact = exact_r_plus_area(h);
  const Estimate rp = r.region_measures.at(Region::RPlus);
  const Estimate rm = r.region_measures.at(Region::RMinus);
  CHECK(std::abs(rp.value - exact) <= 4.0 * rp.error);
  CHECK(std::abs(rm.value - exact) <= 4.0 * rm.error);
  for (const auto& [reg, e] : r.region_measures) {
    CHECK(e.value >= 0.0);
    CHECK(e.error >= 0.0);
  }

  // |Q| ~ sqrt h, |Q'| ~ h^{3/2}: slopes of log-measure against log h
  std::vector<double> lh, lq, lqp;
  for (double hh : {0.02, 0.01, 0.005, 0.0025}) {
    const auto ph = InterchangeParams::make(kNonEquilibrium, hh, 1.0, std::nullopt, quad(11, 100000, 100000));
    const VariationResult v = energy_increment(kAntiplane, kNonEquilibrium, ph);
    lh.push_back(std::log(hh));
    lq.push_back(std::log(v.region_measures.at(Region::Q).value));
    lqp.push_back(std::log(v.region_measures.at(Region::QPrime).value));
  }
  auto slope = [&](const std::vector<double>& y) {
    const double n = static_cast<double>(y.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) sx += lh[i], sy += y[i], sxx += lh[i] * lh[i], sxy += lh[i] * y[i];
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  CHECK(slope(lq) == doctest::Approx(0.5).epsilon(0.3));
  CHECK(slope(lqp) == doctest::Approx(1.5).epsilon(0.14));
}

TEST_CASE("energy increment agrees with a deterministic grid quadrature") {
  for (const auto& pair : {kNonEquilibrium, kEquilibrium}) {
    for (double t : {1.0, 0.4}) {
      const auto p = InterchangeParams::make(pair, 0.05, t, std::nullopt, quad(3, 400000, 200000));
      const VariationResult mc = energy_increment(kAntiplane, pair, p);
      const double grid = grid_increment(kAntiplane, pair, p, 400, 400);
      CHECK(std::abs(mc.delta_e - grid) <= 4.0 * mc.mc_error + 2e-5);
    }
  }
}

TEST_CASE("no jump or no amplitude gives no increment") {
  InterfacePair flat;
  flat.fp = Mat{{1.3, 0.2}};
  flat.fm = flat.fp;
  flat.a = Vec{0.0};
  flat.n = UnitVector{1.0, 0.0};
  const auto p = InterchangeParams::make(flat, 0.05, 1.0, std::nullopt, quad(1, 10000, 10000));
  const VariationResult r = energy_increment(kAntiplane, flat, p);
  CHECK(std::abs(r.delta_e) <= 3.0 * r.mc_error + 1e-15);

  const auto p0 = InterchangeParams::make(kNonEquilibrium, 0.05, 0.0, std::nullopt, quad(1, 10000, 10000));
  CHECK(energy_increment(kAntiplane, kNonEquilibrium, p0).delta_e == 0.0);
}

TEST_CASE("t -> 0 slope of the increment is the first variation, near -h omega N") {
  const auto p = InterchangeParams::make(kNonEquilibrium, 0.01, 1.0, std::nullopt, quad(5, 200000, 100000));
  const VariationResult fv = first_variation(kAntiplane, kNonEquilibrium, p);
  auto small = p;
  small.t = 1e-5;
  const VariationResult inc = energy_increment(kAntiplane, kNonEquilibrium, small);
  // same seed and points: the difference is the O(t) curvature only
  CHECK(inc.delta_e / small.t == doctest::Approx(fv.delta_e).epsilon(1e-3));
  const double target = -2.0 * 0.24 * p.h;
  CHECK(std::abs(fv.delta_e - target) <= 0.15 * std::abs(target));
}

TEST_CASE("seeds: identical runs are bitwise equal, different seeds agree statistically") {
  const auto p1 = InterchangeParams::make(kNonEquilibrium, 0.05, 1.0, std::nullopt, quad(1, 50000, 50000));
  auto p2 = p1;
  p2.quad.seed = 2;
  const auto a = energy_increment(kAntiplane, kNonEquilibrium, p1);
  const auto b = energy_increment(kAntiplane, kNonEquilibrium, p1);
  const auto c = energy_increment(kAntiplane, kNonEquilibrium, p2);
  CHECK(a.delta_e == b.delta_e);
  CHECK(a.mc_error == b.mc_error);
  CHECK(a.delta_e != c.delta_e);
  CHECK(std::abs(a.delta_e - c.delta_e) <= 4.0 * std::hypot(a.mc_error, c.mc_error));
}

TEST_CASE("limit sweep") {
  const Vec grid{0.1, 0.05, 0.025, 0.0125};
  const QuadratureConfig q = quad(1, 500000, 250000);

  SUBCASE("non-equilibrium antiplane pair") {
    const LimitFit f = limit_sweep(kAntiplane, kNonEquilibrium, InterchangeParams::make(kNonEquilibrium, 0.1, 1.0, std::nullopt, q), grid);
    CHECK(f.target == doctest::Approx(-0.24));
    CHECK(std::abs(f.limit - f.target) <= 0.05 * 0.24);
    CHECK(f.rate == doctest::Approx(0.5).epsilon(0.4));
    CHECK(f.converged);
  }
  SUBCASE("equilibrium antiplane pair") {
    const LimitFit f = limit_sweep(kAntiplane, kEquilibrium, InterchangeParams::make(kEquilibrium, 0.1, 1.0, std::nullopt, q), grid);
    CHECK(f.target == 0.0);
    CHECK(std::abs(f.limit) <= 2.0 * f.limit_error);
  }
  SUBCASE("quadratic energy") {
    const auto model = EnergyModel::quadratic(1, 2, 1.0);
    const auto pair = InterfacePair::make(Mat{{0.3, 0.4}}, Mat{{-0.3, 0.0}});
    const double a2 = dot(pair.a, pair.a);
    const LimitFit f = limit_sweep(model, pair, InterchangeParams::make(pair, 0.1, 1.0, std::nullopt, q), grid);
    CHECK(f.target == doctest::Approx(-a2));
    CHECK(std::abs(f.limit - f.target) <= 3.0 * f.limit_error + 0.02 * a2);
  }
  CHECK_THROWS_AS(limit_sweep(kAntiplane, kEquilibrium, InterchangeParams::make(kEquilibrium, 0.1), Vec{0.1, 0.05, 0.025}),
                  ConfigError);
  CHECK_THROWS_AS(limit_sweep(kAntiplane, kEquilibrium, InterchangeParams::make(kEquilibrium, 0.1), Vec{0.1, 0.05, 0.06, 0.01}),
                  ConfigError);
}

TEST_CASE("d_path examples") {
  const Vec ts{0.0, 0.25, 0.5, 1.0};
  for (const auto& pair : {kEquilibrium, kNonEquilibrium}) CHECK(d_path(kAntiplane, pair, ts).front().value == 0.0);
  CHECK(std::abs(d_path(kAntiplane, kEquilibrium, ts).back().value) <= 1e-14);

  const auto iso = EnergyModel::isotropic({2, 0.0, Polynomial{{1, 0, -2, 0, 1}}});
  const auto pair = InterfacePair::make(Mat{{1, 0}, {0, 0}}, Mat{{-1, 0}, {0, 0}});
  Vec grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
  const auto curve = d_path(iso, pair, grid);
  for (const auto& pt : curve) {
    const double t = pt.t;
    CHECK(std::abs(pt.value - 32.0 * t * t * (1 - t) * (1 - t)) <= 1e-10);
  }
  CHECK(curve[50].value == doctest::Approx(2.0));
}

TEST_CASE("d_path_isotropic examples") {
  Vec grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(i / 40.0);
  const IsotropicParams sym{2, 0.0, Polynomial{{1, 0, -2, 0, 1}}};
  const IsotropicPath s = d_path_isotropic(sym, 1.0, -1.0, grid);
  CHECK(s.constraint_ok);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    CHECK(std::abs(s.curve[i].value - 32.0 * t * t * (1 - t) * (1 - t)) <= 1e-10);
    CHECK(std::abs(s.curve[i].value - s.curve[grid.size() - 1 - i].value) <= 1e-12);
  }
  for (const auto& pt : d_path_isotropic(sym, 0.3, 0.3, grid).curve) CHECK(std::abs(pt.value) <= 1e-14);

  // f' equal at both ends: only the four f terms survive
  const IsotropicParams cubic{2, 0.0, Polynomial{{0, -3, 0, 1}}};  // f' = 3 theta^2 - 3
  const Polynomial& f = cubic.f;
  for (const auto& pt : d_path_isotropic(cubic, 2.0, -2.0, grid).curve) {
    const double t = pt.t;
    const double th = 2.0 * t - 2.0 * (1 - t), tht = -2.0 * t + 2.0 * (1 - t);
    CHECK(pt.value == doctest::Approx(f(th) + f(tht) - f(2.0) - f(-2.0)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("general D(t) matches the isotropic closed form") {
  Vec grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(i / 50.0);
  // f = (theta^2 - 1)^2 + 0.1 theta^3, theta+ = 0.8, theta- = -1, mu chosen so that N = 0
  const Polynomial f{{1, 0, -2, 0.1, 1}};
  const double tp = 0.8, tm = -1.0;
  const double mu = -(f.derivative(tp) - f.derivative(tm)) / (tp - tm);
  REQUIRE(mu > 0.0);
  const IsotropicParams params{2, mu, f};
  const auto model = EnergyModel::isotropic(params);
  for (const Vec& nv : {Vec{1, 0}, Vec{0.6, 0.8}}) {
    const Mat fp = tp * outer(nv, nv), fm = tm * outer(nv, nv);
    const auto pair = InterfacePair::make(fp, fm);
    CHECK(std::abs(interchange_force(model, pair)) <= 1e-12);
    const auto general = d_path(model, pair, grid);
    const auto closed = d_path_isotropic(params, tp, tm, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(general[i].value - closed.curve[i].value) <= 1e-10);
  }
}

TEST_CASE("parameter validation and quadrature failures") {
  CHECK_THROWS_AS(InterchangeParams::make(kEquilibrium, 0.0), ConfigError);
  CHECK_THROWS_AS(InterchangeParams::make(kEquilibrium, 1.0), ConfigError);
  CHECK_THROWS_AS(InterchangeParams::make(kEquilibrium, 0.1, 1.5), ConfigError);
  CHECK_THROWS_AS(InterchangeParams::make(kEquilibrium, 0.1, 1.0, UnitVector{1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(InterchangeParams::make(kEquilibrium, 0.1, 1.0, std::nullopt, quad(1, 999, 5000)), ConfigError);

  auto q = quad(1, 5000, 5000);
  q.max_error = 1e-12;
  q.max_refinements = 1;
  const auto p = InterchangeParams::make(kNonEquilibrium, 0.1, 1.0, std::nullopt, q);
  CHECK_THROWS_AS(energy_increment(kAntiplane, kNonEquilibrium, p), QuadratureError);
}

TEST_CASE("three-dimensional interchange field") {
  const auto model = EnergyModel::quadratic(1, 3, 1.0);
  const auto pair = InterfacePair::make(Mat{{0.0, 0.0, 0.5}}, Mat{{0.0, 0.0, -0.5}});
  const auto p = InterchangeParams::make(pair, 0.02, 1.0, std::nullopt, quad(2, 200000, 100000));
  CHECK(std::abs(dot(p.nu.vec(), pair.n.vec())) <= 1e-12);
  const VariationResult r = energy_increment(model, pair, p);
  // omega_2 / 2 D(1) = (pi / 2)(-|a|^2) at leading order
  CHECK(increment_limit_target(model, pair, 1.0) == doctest::Approx(-std::numbers::pi / 2.0));
  CHECK(r.delta_e / p.h < 0.0);
}
