#pragma once

// Closed-form analysis of the anti-plane double well
//   W(F) = min{ mu+/2 |F|^2 + w+, mu-/2 |F|^2 + w- },  F in R^2,
// whose convex (and quasiconvex) envelope, binodal annulus, laminates and
// circular yield surface are all explicit.

#include <cstddef>
#include <span>
#include <vector>

#include "gradjump/energy.hpp"
#include "gradjump/envelope.hpp"

namespace gradjump {

struct AntiplaneAnalysis {
  /// Parameters with phases labelled so that eps_plus < eps_minus ("+" is the
  /// inner phase). `relabeled` records whether the input was swapped.
  AntiplaneParams params;
  bool relabeled = false;
  double eps_plus = 0.0;
  double eps_minus = 0.0;
  double yield_radius = 0.0;    // 2 [[w]] / [[eps]]
  double middle_slope = 0.0;    // sqrt(-2 [[w]] mu+ mu- / [[mu]])
  double middle_offset = 0.0;   // [[mu w]] / [[mu]]

  bool in_binodal(double r, double rel_tol = 1e-12) const;
  /// QW = CW as a function of |F|.
  double envelope(double r) const;
  double envelope(const Mat& f) const { return envelope(frobenius_norm(f)); }
  /// QW_F(F).
  Mat envelope_gradient(const Mat& f) const;
  double phase_energy_plus(double r) const { return 0.5 * params.mu_plus * r * r + params.w_plus; }
  double phase_energy_minus(double r) const { return 0.5 * params.mu_minus * r * r + params.w_minus; }
};

/// Throws BinodalEmptyError when [[w]] [[mu]] >= 0.
AntiplaneAnalysis antiplane_analyze(const AntiplaneParams& params);

/// Simple laminate attaining QW(F0) for F0 in the binodal annulus:
/// theta = (|F0| - eps-) / [[eps]], F± = (eps± / |F0|) F0.
LaminateState laminate_from_macro(const AntiplaneAnalysis& analysis, const Mat& f0);

/// The mechanism (F+, F-) = (eps+ e, eps- e) for a unit direction e.
InterfacePair antiplane_mechanism(const AntiplaneAnalysis& analysis, double angle);

struct LoadingStep {
  std::size_t step = 0;
  double f_norm = 0.0;
  double theta = 0.0;  // volume fraction of the "+" phase
  Vec stress;          // total stress P, length 2
  bool on_yield = false;
};

/// Quasistatic, history-free response along a deformation path. Inside the
/// binodal the laminate stress theta P+ + (1 - theta) P- is reported; the call
/// refuses (OutOfRegionError) if the phase stresses ever differ, since the
/// stress is then not confined to the yield circle.
std::vector<LoadingStep> loading_program(const AntiplaneAnalysis& analysis,
                                         std::span<const Mat> path);

}  // namespace gradjump
