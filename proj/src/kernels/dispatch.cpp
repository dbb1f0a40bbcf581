#include <atomic>
#include <cstdlib>
#include <cstring>

#include "gradjump/error.hpp"
#include "gradjump/kernels.hpp"

namespace gradjump::kernels {

std::string_view name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

bool available(Backend b) {
  switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

namespace {

Backend detect() {
  if (const char* env = std::getenv("GRADJUMP_BACKEND"); env && std::strcmp(env, "scalar") == 0)
    return Backend::Scalar;
  return available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!available(b)) throw UnsupportedError("kernel backend not available on this CPU");
  current().store(b, std::memory_order_relaxed);
}

void rank_one_increment(const RankOneTable& table, double t, double lin_weight,
                        const Batch& batch, std::span<double> out) {
  if (out.size() < batch.size()) throw DimensionError("rank_one_increment: output too small");
  if (active_backend() == Backend::Avx2) {
    rank_one_increment_avx2(table, t, lin_weight, batch, out);
  } else {
    rank_one_increment_scalar(table, t, lin_weight, batch, out);
  }
}

RankOneTable make_table(const EnergyModel& model, std::span<const Mat> states,
                        std::span<const Vec> shears, std::span<const Vec> basis,
                        bool with_linear) {
  if (!model.has_wells()) throw UnsupportedError("make_table: model has no well table");
  if (states.empty() || states.size() > 2 || shears.size() != states.size())
    throw DimensionError("make_table: need one or two base states with matching shears");
  if (basis.empty() || basis.size() > kMaxDim) throw DimensionError("make_table: basis size");

  const auto& wells = model.wells();
  RankOneTable table;
  table.dim = basis.size();
  table.wells = wells.size();
  table.sides = states.size();
  for (const auto& w : wells) {
    table.half_mu.push_back(0.5 * w.mu);
    table.offset.push_back(w.w);
  }
  table.c0.assign(2 * table.wells, 0.0);
  table.b.assign(2 * table.wells * kMaxDim, 0.0);

  for (std::size_t s = 0; s < 2; ++s) {
    const std::size_t src = s < states.size() ? s : 0;
    const Mat& f = states[src];
    const Vec& a = shears[src];
    if (f.rows() != model.m() || f.cols() != model.d() || a.size() != model.m())
      throw DimensionError("make_table: state or shear has wrong shape");
    table.a_sq[s] = dot(a, a);
    table.base[s] = model.eval(f);
    for (std::size_t k = 0; k < table.wells; ++k) {
      const Mat diff = f - wells[k].offset;
      table.c0[s * table.wells + k] = dot(diff.data(), diff.data());
      const Vec bt = apply_transpose(diff, a);
      for (std::size_t i = 0; i < basis.size(); ++i)
        table.b[(s * table.wells + k) * kMaxDim + i] = dot(bt, basis[i]);
    }
    if (with_linear) {
      const Vec pt = apply_transpose(model.piola(f), a);
      for (std::size_t i = 0; i < basis.size(); ++i) table.lin[s][i] = dot(pt, basis[i]);
    }
  }
  return table;
}

}  // namespace gradjump::kernels
