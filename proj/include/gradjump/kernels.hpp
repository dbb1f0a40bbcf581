#pragma once

// Batched evaluation of rank-one energy increments for min-of-wells energies
//
//   out_j = min_k [ mu_k/2 |F_s + t a_s (x) g_j - A_k|^2 + w_k ] - W(F_s)
//           - lambda t (P_s^T a_s) . g_j
//
// where s = side_j selects one of two base states. With lambda = 0 this is
// the interchange integrand W(grad y + t grad Phi) - W(grad y); with
// lambda = 1 and a single side it is the Weierstrass excess W°(F, t a (x) g).
//
// Expanding the square gives per-well constants c0 = |F_s - A_k|^2 and
// b = (F_s - A_k)^T a_s, so the inner loop is a handful of multiply-adds per
// point and well. A scalar reference and an AVX2 variant are provided; the
// variant is selected at runtime and both produce bitwise-identical output.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gradjump/energy.hpp"
#include "gradjump/tensor.hpp"

namespace gradjump::kernels {

inline constexpr std::size_t kMaxDim = 3;

enum class Backend { Scalar, Avx2 };

std::string_view name(Backend b);
bool available(Backend b);
/// Backend used by rank_one_increment. Defaults to the widest available one;
/// GRADJUMP_BACKEND=scalar in the environment forces the reference path.
Backend active_backend();
void set_backend(Backend b);

/// Precomputed constants for up to two base states. `g` vectors are read in
/// the coordinates of the basis passed to make_table.
struct RankOneTable {
  std::size_t dim = 0;
  std::size_t wells = 0;
  std::size_t sides = 0;
  std::vector<double> half_mu;  // [k]
  std::vector<double> offset;   // [k]
  std::vector<double> c0;       // [s * wells + k]
  std::vector<double> b;        // [(s * wells + k) * kMaxDim + i]
  double a_sq[2] = {0.0, 0.0};
  double base[2] = {0.0, 0.0};
  double lin[2][kMaxDim] = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
};

/// Builds the table for base states `states[s]` and shear vectors `shears[s]`.
/// `basis` holds dim orthonormal vectors of R^d; b and lin are projected on
/// it. When `with_linear` is set, P_s = W_F(F_s) is evaluated (and may throw
/// NonsmoothPointError).
RankOneTable make_table(const EnergyModel& model, std::span<const Mat> states,
                        std::span<const Vec> shears, std::span<const Vec> basis,
                        bool with_linear);

struct Batch {
  std::span<const double> g[kMaxDim];
  std::span<const std::int32_t> side;  // 0 or 1 per point
  std::size_t size() const noexcept { return side.size(); }
};

void rank_one_increment(const RankOneTable& table, double t, double lin_weight,
                        const Batch& batch, std::span<double> out);

void rank_one_increment_scalar(const RankOneTable& table, double t, double lin_weight,
                               const Batch& batch, std::span<double> out);
void rank_one_increment_avx2(const RankOneTable& table, double t, double lin_weight,
                             const Batch& batch, std::span<double> out);

}  // namespace gradjump::kernels
