#pragma once

// Shared scalar loop. The AVX2 variant reuses it for the tail so that both
// paths apply the same operation sequence to every point.

#include <cstddef>

#include "gradjump/kernels.hpp"

namespace gradjump::kernels::detail {

struct SideConstants {
  SideConstants(const RankOneTable& table, double t, double lin_weight) {
    two_t = 2.0 * t;
    lwt = lin_weight * t;
    for (int s = 0; s < 2; ++s) tta[s] = (t * t) * table.a_sq[s];
  }
  double two_t;
  double lwt;
  double tta[2];
};

inline void scalar_range(const RankOneTable& table, const SideConstants& sc, const Batch& batch,
                         std::span<double> out, std::size_t begin, std::size_t end) {
  const std::size_t dim = table.dim;
  const std::size_t wells = table.wells;
  for (std::size_t j = begin; j < end; ++j) {
    const std::size_t s = batch.side[j] != 0 ? 1 : 0;
    const double g0 = batch.g[0][j];
    const double g1 = dim > 1 ? batch.g[1][j] : 0.0;
    const double g2 = dim > 2 ? batch.g[2][j] : 0.0;

    double gg = g0 * g0;
    if (dim > 1) gg = gg + g1 * g1;
    if (dim > 2) gg = gg + g2 * g2;

    double best = 0.0;
    for (std::size_t k = 0; k < wells; ++k) {
      const double* b = &table.b[(s * wells + k) * kMaxDim];
      double bg = b[0] * g0;
      if (dim > 1) bg = bg + b[1] * g1;
      if (dim > 2) bg = bg + b[2] * g2;
      const double q = (table.c0[s * wells + k] + sc.two_t * bg) + sc.tta[s] * gg;
      const double e = table.half_mu[k] * q + table.offset[k];
      best = (k == 0 || e < best) ? e : best;
    }

    double lg = table.lin[s][0] * g0;
    if (dim > 1) lg = lg + table.lin[s][1] * g1;
    if (dim > 2) lg = lg + table.lin[s][2] * g2;

    out[j] = (best - table.base[s]) - sc.lwt * lg;
  }
}

}  // namespace gradjump::kernels::detail
