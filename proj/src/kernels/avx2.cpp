#include "gradjump/kernels.hpp"
#include "kernel_common.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define GRADJUMP_X86 1
#include <immintrin.h>
#else
#define GRADJUMP_X86 0
#endif

namespace gradjump::kernels {

#if GRADJUMP_X86

namespace {

// No FMA here: the scalar reference is compiled for baseline x86-64, and
// contracting a*b+c would break bitwise agreement between the two paths.
__attribute__((target("avx2"))) void avx2_body(const RankOneTable& table,
                                               const detail::SideConstants& sc,
                                               const Batch& batch, std::span<double> out,
                                               std::size_t count) {
  const std::size_t dim = table.dim;
  const std::size_t wells = table.wells;
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d two_t = _mm256_set1_pd(sc.two_t);
  const __m256d lwt = _mm256_set1_pd(sc.lwt);
  const __m256d tta0 = _mm256_set1_pd(sc.tta[0]);
  const __m256d tta1 = _mm256_set1_pd(sc.tta[1]);
  const __m256d base0 = _mm256_set1_pd(table.base[0]);
  const __m256d base1 = _mm256_set1_pd(table.base[1]);

  const double* g0p = batch.g[0].data();
  const double* g1p = dim > 1 ? batch.g[1].data() : nullptr;
  const double* g2p = dim > 2 ? batch.g[2].data() : nullptr;
  const std::int32_t* sp = batch.side.data();
  const bool two_sides = table.sides > 1;

  for (std::size_t j = 0; j + 4 <= count; j += 4) {
    __m256d mask = _mm256_setzero_pd();
    if (two_sides) {
      const __m128i s32 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(sp + j));
      const __m256d sd = _mm256_cvtepi32_pd(s32);
      mask = _mm256_cmp_pd(sd, half, _CMP_GT_OQ);
    }
    const __m256d g0 = _mm256_loadu_pd(g0p + j);
    const __m256d g1 = dim > 1 ? _mm256_loadu_pd(g1p + j) : _mm256_setzero_pd();
    const __m256d g2 = dim > 2 ? _mm256_loadu_pd(g2p + j) : _mm256_setzero_pd();

    __m256d gg = _mm256_mul_pd(g0, g0);
    if (dim > 1) gg = _mm256_add_pd(gg, _mm256_mul_pd(g1, g1));
    if (dim > 2) gg = _mm256_add_pd(gg, _mm256_mul_pd(g2, g2));
    const __m256d tta = _mm256_blendv_pd(tta0, tta1, mask);

    __m256d best = _mm256_setzero_pd();
    for (std::size_t k = 0; k < wells; ++k) {
      const double* b0 = &table.b[(0 * wells + k) * kMaxDim];
      const double* b1 = &table.b[(1 * wells + k) * kMaxDim];
      const std::size_t k1 = two_sides ? wells + k : k;
      const __m256d c0 = _mm256_blendv_pd(_mm256_set1_pd(table.c0[k]),
                                          _mm256_set1_pd(table.c0[k1]), mask);
      const __m256d bx = _mm256_blendv_pd(_mm256_set1_pd(b0[0]),
                                          _mm256_set1_pd(two_sides ? b1[0] : b0[0]), mask);
      __m256d bg = _mm256_mul_pd(bx, g0);
      if (dim > 1) {
        const __m256d by = _mm256_blendv_pd(_mm256_set1_pd(b0[1]),
                                            _mm256_set1_pd(two_sides ? b1[1] : b0[1]), mask);
        bg = _mm256_add_pd(bg, _mm256_mul_pd(by, g1));
      }
      if (dim > 2) {
        const __m256d bz = _mm256_blendv_pd(_mm256_set1_pd(b0[2]),
                                            _mm256_set1_pd(two_sides ? b1[2] : b0[2]), mask);
        bg = _mm256_add_pd(bg, _mm256_mul_pd(bz, g2));
      }
      const __m256d q =
          _mm256_add_pd(_mm256_add_pd(c0, _mm256_mul_pd(two_t, bg)), _mm256_mul_pd(tta, gg));
      const __m256d e = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(table.half_mu[k]), q),
                                      _mm256_set1_pd(table.offset[k]));
      best = k == 0 ? e : _mm256_min_pd(e, best);
    }

    const int hi = two_sides ? 1 : 0;
    __m256d lg = _mm256_mul_pd(
        _mm256_blendv_pd(_mm256_set1_pd(table.lin[0][0]), _mm256_set1_pd(table.lin[hi][0]), mask),
        g0);
    if (dim > 1) {
      lg = _mm256_add_pd(lg, _mm256_mul_pd(_mm256_blendv_pd(_mm256_set1_pd(table.lin[0][1]),
                                                            _mm256_set1_pd(table.lin[hi][1]), mask),
                                           g1));
    }
    if (dim > 2) {
      lg = _mm256_add_pd(lg, _mm256_mul_pd(_mm256_blendv_pd(_mm256_set1_pd(table.lin[0][2]),
                                                            _mm256_set1_pd(table.lin[hi][2]), mask),
                                           g2));
    }
    const __m256d base = _mm256_blendv_pd(base0, base1, mask);
    const __m256d r = _mm256_sub_pd(_mm256_sub_pd(best, base), _mm256_mul_pd(lwt, lg));
    _mm256_storeu_pd(out.data() + j, r);
  }
}

}  // namespace

void rank_one_increment_avx2(const RankOneTable& table, double t, double lin_weight,
                             const Batch& batch, std::span<double> out) {
  const detail::SideConstants sc(table, t, lin_weight);
  const std::size_t n = batch.size();
  const std::size_t vec_end = n - n % 4;
  if (available(Backend::Avx2)) {
    avx2_body(table, sc, batch, out, vec_end);
    detail::scalar_range(table, sc, batch, out, vec_end, n);
  } else {
    detail::scalar_range(table, sc, batch, out, 0, n);
  }
}

#else

void rank_one_increment_avx2(const RankOneTable& table, double t, double lin_weight,
                             const Batch& batch, std::span<double> out) {
  rank_one_increment_scalar(table, t, lin_weight, batch, out);
}

#endif

}  // namespace gradjump::kernels
