#pragma once

// Stored-energy densities W(F) on m x d matrices together with their
// gradients P = W_F. The min-of-wells family (which includes the anti-plane
// double well and the plain quadratic) also feeds the batched kernels.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gradjump/tensor.hpp"

namespace gradjump {

enum class EnergyKind {
  MinOfQuadratics,
  AntiplaneDoubleWell,
  IsotropicTheta,
  Quadratic,
  CustomTabulated,
};

std::string to_string(EnergyKind kind);
EnergyKind energy_kind_from_string(const std::string& s);

/// One branch of a min-of-wells energy: mu/2 |F - offset|^2 + w.
struct Well {
  double mu = 1.0;
  Mat offset;
  double w = 0.0;
};

struct QuadraticParams {
  double mu = 1.0;
};

struct MinOfQuadraticsParams {
  std::vector<Well> wells;
};

/// W(F) = min{ mu+/2 |F|^2 + w+, mu-/2 |F|^2 + w- } for F in R^2 (m = 1, d = 2).
struct AntiplaneParams {
  double mu_plus = 2.0;
  double mu_minus = 1.0;
  double w_plus = 0.0;
  double w_minus = 1.0;

  double jump_mu() const { return mu_plus - mu_minus; }
  double jump_w() const { return w_plus - w_minus; }
  /// Throws ConfigError unless moduli are positive and distinct.
  void validate() const;
  /// True when the binodal radii are real: [[w]] [[mu]] < 0.
  bool has_binodal() const { return jump_w() * jump_mu() < 0.0; }
};

/// Polynomial f(theta) with ascending coefficients f[0] + f[1] theta + ...
struct Polynomial {
  std::vector<double> coeffs;

  double operator()(double x) const;
  double derivative(double x) const;
};

/// W(F) = f(theta) + mu |eps - (theta/d) I|^2, theta = tr F, eps = sym F.
struct IsotropicParams {
  std::size_t d = 2;
  double mu = 1.0;
  Polynomial f;
};

/// W(F) tabulated against the Frobenius norm |F| and linearly interpolated.
struct TabulatedParams {
  Vec radius;
  Vec energy;
};

using EnergyParams = std::variant<QuadraticParams, MinOfQuadraticsParams, AntiplaneParams,
                                  IsotropicParams, TabulatedParams>;

struct GradientMode {
  bool analytic = true;
  double fd_step = 1e-5;

  static GradientMode central_difference(double step) { return {false, step}; }
};

class EnergyModel {
 public:
  static EnergyModel quadratic(std::size_t m, std::size_t d, double mu = 1.0);
  static EnergyModel min_of_quadratics(std::size_t m, std::size_t d, std::vector<Well> wells);
  static EnergyModel antiplane(const AntiplaneParams& p);
  static EnergyModel isotropic(const IsotropicParams& p);
  static EnergyModel tabulated(std::size_t m, std::size_t d, TabulatedParams p);

  EnergyModel with_gradient_mode(GradientMode mode) const;
  EnergyModel with_tie_tolerance(double rel) const;

  std::size_t m() const noexcept { return m_; }
  std::size_t d() const noexcept { return d_; }
  EnergyKind kind() const noexcept { return kind_; }
  const EnergyParams& params() const noexcept { return params_; }
  const GradientMode& gradient_mode() const noexcept { return grad_; }
  double tie_tolerance() const noexcept { return tie_rel_; }

  /// Branch table for the min-of-wells family (quadratic, min_of_quadratics,
  /// antiplane); empty for other kinds. For the anti-plane model branch 0 is
  /// the "+" phase and branch 1 the "-" phase.
  const std::vector<Well>& wells() const noexcept { return wells_; }
  bool has_wells() const noexcept { return !wells_.empty(); }

  struct BranchValue {
    double value;
    std::size_t branch;
  };

  double eval(const Mat& f) const;
  /// Value together with the active branch (0 for single-branch kinds).
  BranchValue eval_branch(const Mat& f) const;
  /// Value of a single branch of a min-of-wells energy.
  double branch_value(const Mat& f, std::size_t branch) const;

  /// P = W_F(F). On the tie set of a min-of-wells energy this throws
  /// NonsmoothPointError unless a branch is forced.
  Mat piola(const Mat& f, std::optional<std::size_t> forced_branch = std::nullopt) const;

  /// W(F + H) - W(F) - (W_F(F), H).
  double weierstrass_excess(const Mat& f, const Mat& h) const;

  /// Central-difference gradient with the given step, ignoring gradient_mode.
  Mat finite_difference_gradient(const Mat& f, double step) const;

 private:
  EnergyModel(std::size_t m, std::size_t d, EnergyKind kind, EnergyParams params);

  void check_shape(const Mat& f) const;
  Mat analytic_gradient(const Mat& f, std::size_t branch) const;
  Mat well_gradient(const Mat& f, std::size_t branch) const;

  std::size_t m_ = 1;
  std::size_t d_ = 1;
  EnergyKind kind_ = EnergyKind::Quadratic;
  EnergyParams params_;
  std::vector<Well> wells_;
  GradientMode grad_;
  double tie_rel_ = 1e-10;
};

}  // namespace gradjump
