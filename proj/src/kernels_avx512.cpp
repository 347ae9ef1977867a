// Compiled with -mavx512f; FMA contraction is disabled project-wide.
#include "detail/lane_kernel.hpp"
#include "detail/simd_avx512.hpp"

namespace hardexc::kernels::detail {

void dp5_trial_avx512(const LaneBlock& block, std::size_t begin,
                      std::size_t end) {
  std::size_t lane = begin;
  for (; lane + 8 <= end; lane += 8)
    hardexc::detail::dp5_lane_group<hardexc::detail::F64x8>(block, lane);
  dp5_trial_scalar(block, lane, end);
}

}  // namespace hardexc::kernels::detail
