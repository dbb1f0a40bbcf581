#include "gradjump/kernels.hpp"
#include "kernel_common.hpp"

namespace gradjump::kernels {

void rank_one_increment_scalar(const RankOneTable& table, double t, double lin_weight,
                               const Batch& batch, std::span<double> out) {
  const detail::SideConstants sc(table, t, lin_weight);
  detail::scalar_range(table, sc, batch, out, 0, batch.size());
}

}  // namespace gradjump::kernels
