#include "gradjump/antiplane.hpp"

#include <algorithm>
#include <cmath>

#include "gradjump/error.hpp"

namespace gradjump {

namespace {

struct Radii {
  double plus, minus;
};

Radii binodal_radii(const AntiplaneParams& p) {
  const double jw = p.jump_w(), jmu = p.jump_mu();
  return {std::sqrt(-2.0 * jw * p.mu_minus / (jmu * p.mu_plus)),
          std::sqrt(-2.0 * jw * p.mu_plus / (jmu * p.mu_minus))};
}

}  // namespace

AntiplaneAnalysis antiplane_analyze(const AntiplaneParams& input) {
  input.validate();
  if (!input.has_binodal())
    throw BinodalEmptyError("antiplane: [[w]] [[mu]] must be negative for a nonempty binodal");

  AntiplaneAnalysis a;
  a.params = input;
  Radii r = binodal_radii(input);
  if (r.plus > r.minus) {
    std::swap(a.params.mu_plus, a.params.mu_minus);
    std::swap(a.params.w_plus, a.params.w_minus);
    a.relabeled = true;
    r = binodal_radii(a.params);
  }
  const AntiplaneParams& p = a.params;
  a.eps_plus = r.plus;
  a.eps_minus = r.minus;
  a.yield_radius = 2.0 * p.jump_w() / (a.eps_plus - a.eps_minus);
  a.middle_slope = std::sqrt(-2.0 * p.jump_w() * p.mu_plus * p.mu_minus / p.jump_mu());
  a.middle_offset = (p.mu_plus * p.w_plus - p.mu_minus * p.w_minus) / p.jump_mu();
  return a;
}

bool AntiplaneAnalysis::in_binodal(double r, double rel_tol) const {
  return r >= eps_plus * (1.0 - rel_tol) && r <= eps_minus * (1.0 + rel_tol);
}

double AntiplaneAnalysis::envelope(double r) const {
  if (r <= eps_plus) return phase_energy_plus(r);
  if (r >= eps_minus) return phase_energy_minus(r);
  return r * middle_slope + middle_offset;
}

Mat AntiplaneAnalysis::envelope_gradient(const Mat& f) const {
  if (f.rows() != 1 || f.cols() != 2) throw DimensionError("antiplane: F must be 1x2");
  const double r = frobenius_norm(f);
  if (r <= eps_plus) return params.mu_plus * f;
  if (r >= eps_minus) return params.mu_minus * f;
  return (middle_slope / r) * f;
}

LaminateState laminate_from_macro(const AntiplaneAnalysis& analysis, const Mat& f0) {
  if (f0.rows() != 1 || f0.cols() != 2) throw DimensionError("laminate_from_macro: F0 must be 1x2");
  const double r = frobenius_norm(f0);
  if (!analysis.in_binodal(r))
    throw OutOfRegionError("laminate_from_macro: |F0| = " + std::to_string(r) +
                           " lies outside the binodal [" + std::to_string(analysis.eps_plus) + ", " +
                           std::to_string(analysis.eps_minus) + "]");
  LaminateState s;
  s.theta = std::clamp((r - analysis.eps_minus) / (analysis.eps_plus - analysis.eps_minus), 0.0, 1.0);
  s.fp = (analysis.eps_plus / r) * f0;
  s.fm = (analysis.eps_minus / r) * f0;
  s.f_macro = f0;
  s.energy = s.theta * analysis.phase_energy_plus(analysis.eps_plus) +
             (1.0 - s.theta) * analysis.phase_energy_minus(analysis.eps_minus);
  return s;
}

InterfacePair antiplane_mechanism(const AntiplaneAnalysis& analysis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return InterfacePair::make(Mat{{analysis.eps_plus * c, analysis.eps_plus * s}},
                             Mat{{analysis.eps_minus * c, analysis.eps_minus * s}});
}

std::vector<LoadingStep> loading_program(const AntiplaneAnalysis& analysis, std::span<const Mat> path) {
  const auto& p = analysis.params;
  std::vector<LoadingStep> trace(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Mat& f = path[i];
    if (f.rows() != 1 || f.cols() != 2) throw DimensionError("loading_program: F must be 1x2");
    LoadingStep& st = trace[i];
    st.step = i;
    st.f_norm = frobenius_norm(f);
    Mat stress;
    if (analysis.in_binodal(st.f_norm) && st.f_norm > 0.0) {
      const LaminateState lam = laminate_from_macro(analysis, f);
      const Mat pp = p.mu_plus * lam.fp;
      const Mat pm = p.mu_minus * lam.fm;
      const double jump = frobenius_norm(pp - pm);
      if (jump > 1e-10 * (1.0 + frobenius_norm(pp))) {
        throw OutOfRegionError("loading_program: phase stresses differ by " + std::to_string(jump) +
                               "; total stress is not confined to a yield surface");
      }
      st.theta = lam.theta;
      stress = lam.theta * pp + (1.0 - lam.theta) * pm;
      st.on_yield = true;
    } else if (st.f_norm < analysis.eps_plus) {
      st.theta = 1.0;
      stress = p.mu_plus * f;
    } else {
      st.theta = 0.0;
      stress = p.mu_minus * f;
    }
    st.stress = stress.row(0);
  }
  return trace;
}

}  // namespace gradjump
