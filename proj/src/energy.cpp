#include "gradjump/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gradjump/error.hpp"

namespace gradjump {

std::string to_string(EnergyKind kind) {
  switch (kind) {
    case EnergyKind::MinOfQuadratics: return "min_of_quadratics";
    case EnergyKind::AntiplaneDoubleWell: return "antiplane_double_well";
    case EnergyKind::IsotropicTheta: return "isotropic_theta_model";
    case EnergyKind::Quadratic: return "quadratic";
    case EnergyKind::CustomTabulated: return "custom_tabulated";
  }
  return "unknown";
}

EnergyKind energy_kind_from_string(const std::string& s) {
  for (auto k : {EnergyKind::MinOfQuadratics, EnergyKind::AntiplaneDoubleWell,
                 EnergyKind::IsotropicTheta, EnergyKind::Quadratic, EnergyKind::CustomTabulated}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown energy kind '" + s + "'");
}

void AntiplaneParams::validate() const {
  if (!(mu_plus > 0.0) || !(mu_minus > 0.0)) throw ConfigError("antiplane: shear moduli must be positive");
  if (mu_plus == mu_minus) throw ConfigError("antiplane: shear moduli must differ");
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::derivative(double x) const {
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * coeffs[k];
  return acc;
}

EnergyModel::EnergyModel(std::size_t m, std::size_t d, EnergyKind kind, EnergyParams params)
    : m_(m), d_(d), kind_(kind), params_(std::move(params)) {
  if (m_ == 0 || d_ == 0) throw DimensionError("energy model: m and d must be positive");
}

EnergyModel EnergyModel::quadratic(std::size_t m, std::size_t d, double mu) {
  if (!(mu > 0.0)) throw ConfigError("quadratic: mu must be positive");
  EnergyModel model(m, d, EnergyKind::Quadratic, QuadraticParams{mu});
  model.wells_.push_back(Well{mu, Mat::zeros(m, d), 0.0});
  return model;
}

EnergyModel EnergyModel::min_of_quadratics(std::size_t m, std::size_t d, std::vector<Well> wells) {
  if (wells.empty()) throw ConfigError("min_of_quadratics: at least one well required");
  for (auto& w : wells) {
    if (w.offset.empty()) w.offset = Mat::zeros(m, d);
    if (w.offset.rows() != m || w.offset.cols() != d)
      throw DimensionError("min_of_quadratics: well offset has wrong shape");
    if (!(w.mu > 0.0)) throw ConfigError("min_of_quadratics: mu must be positive");
  }
  EnergyModel model(m, d, EnergyKind::MinOfQuadratics, MinOfQuadraticsParams{wells});
  model.wells_ = std::move(wells);
  return model;
}

EnergyModel EnergyModel::antiplane(const AntiplaneParams& p) {
  p.validate();
  EnergyModel model(1, 2, EnergyKind::AntiplaneDoubleWell, p);
  model.wells_.push_back(Well{p.mu_plus, Mat::zeros(1, 2), p.w_plus});
  model.wells_.push_back(Well{p.mu_minus, Mat::zeros(1, 2), p.w_minus});
  return model;
}

EnergyModel EnergyModel::isotropic(const IsotropicParams& p) {
  if (p.d == 0) throw ConfigError("isotropic: d must be positive");
  if (p.mu < 0.0) throw ConfigError("isotropic: mu must be non-negative");
  if (p.f.coeffs.empty()) throw ConfigError("isotropic: f needs at least one coefficient");
  return EnergyModel(p.d, p.d, EnergyKind::IsotropicTheta, p);
}

EnergyModel EnergyModel::tabulated(std::size_t m, std::size_t d, TabulatedParams p) {
  if (p.radius.size() < 2 || p.radius.size() != p.energy.size())
    throw ConfigError("custom_tabulated: need matching radius/energy tables of length >= 2");
  if (!std::is_sorted(p.radius.begin(), p.radius.end()) ||
      std::adjacent_find(p.radius.begin(), p.radius.end()) != p.radius.end())
    throw ConfigError("custom_tabulated: radius grid must be strictly increasing");
  EnergyModel model(m, d, EnergyKind::CustomTabulated, std::move(p));
  model.grad_ = GradientMode::central_difference(1e-5);
  return model;
}

EnergyModel EnergyModel::with_gradient_mode(GradientMode mode) const {
  if (mode.analytic && kind_ == EnergyKind::CustomTabulated)
    throw ConfigError("custom_tabulated has no analytic gradient");
  if (!mode.analytic && !(mode.fd_step > 0.0)) throw ConfigError("fd_step must be positive");
  EnergyModel copy = *this;
  copy.grad_ = mode;
  return copy;
}

EnergyModel EnergyModel::with_tie_tolerance(double rel) const {
  if (!(rel >= 0.0)) throw ConfigError("tie tolerance must be non-negative");
  EnergyModel copy = *this;
  copy.tie_rel_ = rel;
  return copy;
}

void EnergyModel::check_shape(const Mat& f) const {
  if (f.rows() != m_ || f.cols() != d_) {
    throw DimensionError("energy model expects " + std::to_string(m_) + "x" + std::to_string(d_) +
                         " argument, got " + std::to_string(f.rows()) + "x" +
                         std::to_string(f.cols()));
  }
}

double EnergyModel::branch_value(const Mat& f, std::size_t branch) const {
  check_shape(f);
  if (branch >= wells_.size()) throw DimensionError("branch index out of range");
  const Well& well = wells_[branch];
  double sq = 0.0;
  const auto fd = f.data();
  const auto od = well.offset.data();
  for (std::size_t k = 0; k < fd.size(); ++k) {
    const double e = fd[k] - od[k];
    sq += e * e;
  }
  return 0.5 * well.mu * sq + well.w;
}

EnergyModel::BranchValue EnergyModel::eval_branch(const Mat& f) const {
  check_shape(f);
  if (!wells_.empty()) {
    BranchValue best{branch_value(f, 0), 0};
    for (std::size_t k = 1; k < wells_.size(); ++k) {
      const double v = branch_value(f, k);
      if (v < best.value) best = {v, k};
    }
    return best;
  }
  if (const auto* iso = std::get_if<IsotropicParams>(&params_)) {
    double theta = 0.0;
    for (std::size_t i = 0; i < d_; ++i) theta += f(i, i);
    const double mean = theta / static_cast<double>(d_);
    double dev = 0.0;
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t j = 0; j < d_; ++j) {
        double e = 0.5 * (f(i, j) + f(j, i));
        if (i == j) e -= mean;
        dev += e * e;
      }
    }
    return {iso->f(theta) + iso->mu * dev, 0};
  }
  if (const auto* tab = std::get_if<TabulatedParams>(&params_)) {
    const double r = frobenius_norm(f);
    const auto& xs = tab->radius;
    const auto& ys = tab->energy;
    std::size_t hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), r) - xs.begin());
    hi = std::clamp<std::size_t>(hi, 1, xs.size() - 1);
    const std::size_t lo = hi - 1;
    const double s = (r - xs[lo]) / (xs[hi] - xs[lo]);
    return {ys[lo] + s * (ys[hi] - ys[lo]), 0};
  }
  throw UnsupportedError("eval: unsupported energy kind");
}

double EnergyModel::eval(const Mat& f) const { return eval_branch(f).value; }

Mat EnergyModel::well_gradient(const Mat& f, std::size_t branch) const {
  const Well& well = wells_[branch];
  Mat g = f - well.offset;
  g *= well.mu;
  return g;
}

Mat EnergyModel::analytic_gradient(const Mat& f, std::size_t branch) const {
  if (!wells_.empty()) return well_gradient(f, branch);
  if (const auto* iso = std::get_if<IsotropicParams>(&params_)) {
    double theta = 0.0;
    for (std::size_t i = 0; i < d_; ++i) theta += f(i, i);
    const double mean = theta / static_cast<double>(d_);
    const double fp = iso->f.derivative(theta);
    Mat p(d_, d_);
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t j = 0; j < d_; ++j) {
        double e = 0.5 * (f(i, j) + f(j, i));
        if (i == j) e -= mean;
        p(i, j) = 2.0 * iso->mu * e + (i == j ? fp : 0.0);
      }
    }
    return p;
  }
  throw UnsupportedError("no analytic gradient for " + to_string(kind_));
}

Mat EnergyModel::finite_difference_gradient(const Mat& f, double step) const {
  check_shape(f);
  Mat g(m_, d_);
  Mat probe = f;
  for (std::size_t i = 0; i < m_; ++i) {
    for (std::size_t j = 0; j < d_; ++j) {
      const double saved = probe(i, j);
      probe(i, j) = saved + step;
      const double up = eval(probe);
      probe(i, j) = saved - step;
      const double down = eval(probe);
      probe(i, j) = saved;
      g(i, j) = (up - down) / (2.0 * step);
    }
  }
  return g;
}

Mat EnergyModel::piola(const Mat& f, std::optional<std::size_t> forced_branch) const {
  check_shape(f);
  std::size_t branch = 0;
  if (wells_.size() > 1) {
    if (forced_branch) {
      if (*forced_branch >= wells_.size()) throw DimensionError("forced branch out of range");
      branch = *forced_branch;
    } else {
      // Locate the two lowest branches; refuse to differentiate on a tie.
      std::size_t first = 0, second = 1;
      double v0 = branch_value(f, 0), v1 = branch_value(f, 1);
      if (v1 < v0) {
        std::swap(first, second);
        std::swap(v0, v1);
      }
      for (std::size_t k = 2; k < wells_.size(); ++k) {
        const double v = branch_value(f, k);
        if (v < v0) {
          second = first, v1 = v0;
          first = k, v0 = v;
        } else if (v < v1) {
          second = k, v1 = v;
        }
      }
      if (v1 - v0 < tie_rel_ * (1.0 + std::abs(v0))) {
        throw NonsmoothPointError("piola: F lies on the tie set of branches " +
                                      std::to_string(first) + " and " + std::to_string(second),
                                  first, second, well_gradient(f, first), well_gradient(f, second));
      }
      branch = first;
    }
    if (grad_.analytic || forced_branch) return well_gradient(f, branch);
  } else if (forced_branch && *forced_branch != 0) {
    throw DimensionError("forced branch out of range");
  }
  if (!grad_.analytic) return finite_difference_gradient(f, grad_.fd_step);
  return analytic_gradient(f, branch);
}

double EnergyModel::weierstrass_excess(const Mat& f, const Mat& h) const {
  check_shape(h);
  const Mat p = piola(f);
  return eval(f + h) - eval(f) - frobenius(p, h);
}

}  // namespace gradjump
