// Compiled with -mavx2 (no FMA); selected at runtime only on AVX2 hosts.
#include "detail/lane_kernel.hpp"
#include "detail/simd_avx2.hpp"

namespace hardexc::kernels::detail {

void dp5_trial_avx2(const LaneBlock& block, std::size_t begin,
                    std::size_t end) {
  std::size_t lane = begin;
  for (; lane + 4 <= end; lane += 4)
    hardexc::detail::dp5_lane_group<hardexc::detail::F64x4>(block, lane);
  dp5_trial_scalar(block, lane, end);
}

}  // namespace hardexc::kernels::detail
