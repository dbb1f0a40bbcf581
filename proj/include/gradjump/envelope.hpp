#pragma once

// One-dimensional rank-one envelopes: restriction of W to the segment
// t F+ + (1 - t) F-, its discrete lower convex hull, one-sided hull slopes at
// the endpoints, and the yield-plane / strain-rate geometry of a laminate.

#include <cstddef>
#include <span>
#include <vector>

#include "gradjump/energy.hpp"
#include "gradjump/jump.hpp"
#include "gradjump/tensor.hpp"

namespace gradjump {

struct AffineSegment {
  double t_start;
  double t_end;
  double slope;
  std::size_t intervals;  // grid intervals spanned
  bool proper() const { return intervals > 1; }
};

struct EnvelopeCurve {
  Vec t_grid;
  Vec w_values;
  Vec hull_values;
  std::vector<AffineSegment> affine_segments;
};

/// Lower convex hull of (x_i, y_i) evaluated back on the x grid. x must be
/// strictly increasing. Collinear points are dropped from the vertex set.
Vec lower_convex_hull(std::span<const double> x, std::span<const double> y);

/// Vertex indices of the lower convex hull (monotone chain).
std::vector<std::size_t> lower_hull_vertices(std::span<const double> x, std::span<const double> y);

/// Maximal runs of hull edges whose slopes agree within 1e-8 (1 + |slope|).
std::vector<AffineSegment> affine_segments(std::span<const double> x, std::span<const double> hull);

EnvelopeCurve rank_one_restriction(const EnergyModel& model, const InterfacePair& pair,
                                   std::span<const double> t_grid);

/// n + 1 equally spaced points on [0, 1].
Vec uniform_grid(std::size_t intervals);

enum class Endpoint { Minus, Plus };  // t = 0 (F-) and t = 1 (F+)

/// One-sided difference quotient of hull_values at an endpoint (slope in t).
double one_sided_slope(const EnvelopeCurve& curve, Endpoint at);

struct DerivativeOptions {
  std::size_t initial_intervals = 64;
  std::size_t max_levels = 14;
  double tol = 1e-9;
};

struct DirectionalDerivative {
  double value = 0.0;     // Richardson-extrapolated hull slope
  double expected = 0.0;  // (W_F(F_end), [[F]])
  std::size_t intervals = 0;
  double change = 0.0;  // last change between refinement levels
};

/// Refines the grid by halving until the extrapolated slope settles. Throws
/// NonconvergenceError when it does not within max_levels.
DirectionalDerivative directional_derivative(const EnergyModel& model, const InterfacePair& pair,
                                             Endpoint at, const DerivativeOptions& options = {});

struct AffineReport {
  double max_deviation = 0.0;
  double t_at_max = 0.0;
  bool pass = false;
  double tol = 0.0;
};

/// max_t |hull(t) - (t W+ + (1 - t) W-)| on a uniform grid. Certifies the
/// restriction to the segment only.
AffineReport check_affine_formula(const EnergyModel& model, const InterfacePair& pair, double tol,
                                  std::size_t intervals = 1000);

struct LaminateState {
  double theta = 0.0;
  Mat fp;
  Mat fm;
  Mat f_macro;
  double energy = 0.0;
};

/// Yield plane {P : (P, [[F]]) = [[W]]} of the mechanism (F+, F-).
struct PlasticMechanism {
  InterfacePair pair;
  Mat yield_normal;
  double yield_offset = 0.0;
  double frak_n = 0.0;
  bool normality = false;   // (P+, [[F]]) = (P-, [[F]]) within tol
  double gap_plus = 0.0;    // (P+, [[F]]) - [[W]]
  double gap_minus = 0.0;   // (P-, [[F]]) - [[W]]
  double origin_distance = 0.0;

  /// Signed distance of P from the plane along [[F]] / |[[F]]|.
  double signed_distance(const Mat& p) const;
};

PlasticMechanism yield_plane(const EnergyModel& model, const InterfacePair& pair,
                             double tol = 1e-10);

struct StrainRateSplit {
  Mat elastic;
  Mat plastic;
};

/// elastic = theta dFp + (1 - theta) dFm, plastic = dtheta [[F]].
StrainRateSplit strain_rate_split(const LaminateState& state, double dtheta, const Mat& dfp,
                                  const Mat& dfm);

}  // namespace gradjump
