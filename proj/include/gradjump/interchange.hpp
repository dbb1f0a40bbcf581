#pragma once

// The interchange test field Phi_h, its energy increment over the unit ball,
// and the h -> 0 / t -> 0 limits of the normalized increment.
//
// Coordinates: n is the interface normal, nu a unit vector orthogonal to n,
// c = z.n, s = z.nu, r = |z|. The field is
//
//   Phi_h(z) = (psi(z) + psi(-z)) a,  psi(z) = h phi(c/h) rho(s/sqrt h) zeta_h(r)
//
// and grad y(z) = F+ for c > 0, F- otherwise.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gradjump/energy.hpp"
#include "gradjump/jump.hpp"
#include "gradjump/tensor.hpp"

namespace gradjump {

struct Cutoffs {
  double phi;
  double rho;
  double zeta;
};

/// phi(s) = 1 (s <= 0), 1 - s (0 < s < 1), 0 (s >= 1); rho(s) = clamp(s, 0, 1);
/// zeta_h(s) = 1 on [0, 1 - sqrt h], linear down to 0 at s = 1, 0 beyond.
Cutoffs cutoffs(double h, double s);

enum class Region { RPlus, RMinus, Q, QPrime, SupportComplement };
std::string to_string(Region r);

enum class Stratum { Slab, Strip, Ring, Bulk };
std::string to_string(Stratum s);
Stratum stratum_from_string(const std::string& s);

/// Strata are sampled on jittered grids (two points per cell) so every
/// estimate carries its own one-sigma error. Each stratum draws from an
/// independent stream seeded by (seed, stratum).
///   slab:  |z.n| < h
///   strip: |z.nu| < sqrt h, outside the slab
///   ring:  |z| > 1 - sqrt h, outside slab and strip
///   bulk:  rest of the ball (the increment vanishes there)
struct QuadratureConfig {
  std::uint64_t seed = 1;
  std::size_t samples_slab = 500'000;
  std::size_t samples_bulk = 250'000;  // per non-slab stratum
  std::vector<Stratum> stratification{Stratum::Slab, Stratum::Strip, Stratum::Ring};
  double max_error = std::numeric_limits<double>::infinity();
  std::size_t max_refinements = 3;  // sample doublings before giving up on max_error
};

struct InterchangeParams {
  double h = 0.05;
  double t = 1.0;
  UnitVector nu;
  QuadratureConfig quad;

  /// Uses `default_tangent(pair.n)` when nu is not given.
  static InterchangeParams make(const InterfacePair& pair, double h, double t = 1.0,
                                std::optional<UnitVector> nu = std::nullopt,
                                QuadratureConfig quad = {});
  void validate(const InterfacePair& pair) const;
};

/// A unit vector orthogonal to n (d = 2: n rotated by +90 degrees).
UnitVector default_tangent(const UnitVector& n);

struct FieldValue {
  Vec value;     // Phi_h(z), length m
  Mat gradient;  // grad Phi_h(z) = a (x) g(z)
};

FieldValue field(const InterfacePair& pair, const InterchangeParams& params,
                 std::span<const double> z);

Region classify_region(const InterfacePair& pair, const InterchangeParams& params,
                       std::span<const double> z);

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct VariationResult {
  double delta_e = 0.0;
  double mc_error = 0.0;
  std::map<Region, Estimate> region_measures;
  std::size_t samples = 0;
};

/// Delta E(t, h) = int_B W(grad y + t grad Phi_h) - W(grad y) dz.
VariationResult energy_increment(const EnergyModel& model, const InterfacePair& pair,
                                 const InterchangeParams& params);

/// int_B (W_F(grad y), grad Phi_h) dz, the t -> 0 slope of Delta E(t, h).
VariationResult first_variation(const EnergyModel& model, const InterfacePair& pair,
                                const InterchangeParams& params);

/// (omega_{d-1} / 2) D(t): the h -> 0 limit of Delta E(t, h) / h.
double increment_limit_target(const EnergyModel& model, const InterfacePair& pair, double t);

struct LimitPoint {
  double h;
  double value;  // Delta E(t, h) / h
  double error;
};

struct LimitFit {
  std::vector<LimitPoint> points;
  double limit = 0.0;  // L in value = L + C sqrt(h) + D h
  double limit_error = 0.0;
  double slope = 0.0;      // C
  double curvature = 0.0;  // D
  double rate = 0.0;       // log-log slope of |value - L| against h
  double residual_rms = 0.0;
  double target = 0.0;
  bool converged = true;
};

/// Weighted least-squares fit of L + C sqrt(h) + D h. The O(h) term is kept
/// because at desk-scale h it is as large as the sqrt(h) one. `limit_error` is
/// the one-sigma error of L, inflated by the reduced chi-square when the model
/// misfits. `rate` is the exponent of the approach to L; it is NaN (and the fit
/// unconverged) when value - L changes sign along the grid. `converged` is
/// also false when the RMS residual exceeds `residual_threshold`.
LimitFit limit_sweep(const EnergyModel& model, const InterfacePair& pair,
                     const InterchangeParams& params, std::span<const double> h_grid,
                     double residual_threshold = 1e-2);

/// The same fit on already computed points (at least four).
LimitFit fit_sqrt_h(std::vector<LimitPoint> points, double residual_threshold = 1e-2);

struct CommutationResult {
  // lim_h lim_t Delta E / (t h): the inner t-limit is extrapolated linearly
  // from the t grid using common random numbers.
  std::vector<LimitPoint> t_first;  // (h, lim_t Delta E / (t h), error)
  LimitFit t_first_fit;
  // lim_t lim_h: each t runs a limit sweep, L(t)/t is extrapolated to t = 0.
  std::vector<LimitPoint> h_first;  // (t, L(t) / t, error)
  double h_first_limit = 0.0;
  double h_first_error = 0.0;
  double target = 0.0;  // -omega_{d-1} 𝔑
};

CommutationResult limit_commutation(const EnergyModel& model, const InterfacePair& pair,
                                    const InterchangeParams& params,
                                    std::span<const double> h_grid,
                                    std::span<const double> t_grid);

struct CurvePoint {
  double t;
  double value;
};

/// D(t) = W°(F+, -t [[F]]) + W°(F-, t [[F]]) - 2 t 𝔑.
std::vector<CurvePoint> d_path(const EnergyModel& model, const InterfacePair& pair,
                               std::span<const double> t_grid);

struct IsotropicPath {
  std::vector<CurvePoint> curve;
  bool constraint_ok = true;  // [[Phi']] [[theta]] <= 0
  double constraint_value = 0.0;
};

/// Closed form of D(t) for the isotropic theta model under compatibility and
/// normality: f(theta_t) + f(theta~_t) - f(theta+) - f(theta-)
/// + t (1 - t) [[f']] [[theta]].
IsotropicPath d_path_isotropic(const IsotropicParams& params, double theta_plus,
                               double theta_minus, std::span<const double> t_grid);

}  // namespace gradjump
