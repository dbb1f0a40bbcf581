#pragma once

// Algebraic interface quantities for a rank-one connected pair (F+, F-):
// driving forces, traction and roughening residuals, the Weierstrass scan,
// and the verdict bundle.

#include <cstddef>
#include <optional>
#include <string>

#include "gradjump/energy.hpp"
#include "gradjump/tensor.hpp"

namespace gradjump {

/// Kinematically compatible pair: Fp - Fm = a (x) n.
struct InterfacePair {
  Mat fp;
  Mat fm;
  Vec a;
  UnitVector n;
  double tol = 1e-9;

  static InterfacePair make(Mat fp, Mat fm, double tol = 1e-9);
  Mat jump() const { return fp - fm; }
};

/// 𝔑 = ([[P]], [[F]]).
double interchange_force(const EnergyModel& model, const InterfacePair& pair);

/// p* = [[W]] - ({P}, [[F]]) with {P} the average stress.
double maxwell_force(const EnergyModel& model, const InterfacePair& pair);

/// [[P]] n, length m.
Vec traction_residual(const EnergyModel& model, const InterfacePair& pair);

/// [[P]]^T a, length d.
Vec roughening_residual(const EnergyModel& model, const InterfacePair& pair);

struct ScanResult {
  double min_value = 0.0;
  Vec u;
  Vec v;
  double r = 0.0;
  std::size_t evaluations = 0;
};

/// Logarithmic grid of `count` radii over [1e-3, 10] * scale.
Vec default_scan_radii(double scale, std::size_t count = 81);

/// min of W°(F, r u (x) v) over sphere_grid(m) x sphere_grid(d) x radii.
/// Ties keep the lexicographically first (u, v, r) index triple.
ScanResult weierstrass_scan(const EnergyModel& model, const Mat& f, std::span<const double> radii,
                            std::size_t resolution);

/// 𝔑 - 2|p*|. Reported, never enforced.
double normality_gap(const EnergyModel& model, const InterfacePair& pair);

/// Exact omega± = W°(F±, ∓(a + xi) (x) (n + eta)) against its first-order
/// expansion ∓p* + 𝔑/2 + ([[P]] n, xi) + ([[P]]^T a, eta).
struct TaylorResidual {
  double lhs_plus, rhs_plus;
  double lhs_minus, rhs_minus;
};
TaylorResidual taylor_residual(const EnergyModel& model, const InterfacePair& pair,
                               std::span<const double> xi, std::span<const double> eta);

struct Tolerances {
  double abs = 1e-10;
  double rel = 1e-10;

  double bound(double scale) const { return abs + rel * scale; }
};

struct DiagnosticOptions {
  Tolerances tol;
  std::optional<Vec> radii;      // default_scan_radii(|[[F]]|) when empty
  std::size_t resolution = 128;  // sphere_grid resolution for both factors
};

struct JumpDiagnostics {
  double p_star = 0.0;
  double frak_n = 0.0;
  Vec traction_residual;
  Vec roughening_residual;
  double weierstrass_min_plus = 0.0;
  double weierstrass_min_minus = 0.0;
  double normality_gap = 0.0;

  double stress_scale = 0.0;  // |P+| + |P-|
  double energy_scale = 0.0;  // |W+| + |W-|
  double stress_tol = 0.0;
  double energy_tol = 0.0;
  Tolerances tolerances;

  bool maxwell_ok = false;
  bool traction_ok = false;
  bool roughening_ok = false;
  bool interchange_ok = false;
  bool weierstrass_ok = false;

  bool all_ok() const {
    return maxwell_ok && traction_ok && roughening_ok && interchange_ok && weierstrass_ok;
  }
};

/// Evaluates every residual and derives the verdicts. Stress-valued residuals
/// are compared with abs + rel (|P+| + |P-|); energy-valued ones with
/// abs + rel (|W+| + |W-|). Interchange stability is 𝔑 <= tolerance.
JumpDiagnostics diagnose(const EnergyModel& model, const InterfacePair& pair,
                         const DiagnosticOptions& options = {});

}  // namespace gradjump
