#pragma once

// Shared body of the batched trial step: load one lane group, run the
// templated step, store.  V must provide load/store and a broadcast ctor.

#include "detail/dp5.hpp"
#include "hardexc/kernels.hpp"

namespace hardexc::detail {

template <class V>
inline void dp5_lane_group(const kernels::LaneBlock& blk, std::size_t lane) {
  using kernels::kDim;
  const std::size_t st = blk.stride;
  const double* c = blk.coeff + lane;
  const auto coeffs = make_coeffs<V>(
      V::load(c), V::load(c + st), V::load(c + 2 * st), V::load(c + 3 * st),
      V::load(c + 4 * st), V::load(c + 5 * st), V::load(c + 6 * st),
      V::load(c + 7 * st), V::load(c + 8 * st));
  V y[kDim], k1[kDim], ynew[kDim], k[7][kDim];
  for (std::size_t i = 0; i < kDim; ++i) {
    y[i] = V::load(blk.y + i * st + lane);
    k1[i] = V::load(blk.k1 + i * st + lane);
  }
  const V h = V::load(blk.h + lane);
  auto rhs = [&coeffs](V, const V* in, V* out) {
    rotating_rhs(coeffs, in, out);
  };
  const V err =
      dp5_trial(rhs, V(0.0), h, y, k1, ynew, k, blk.absTol, blk.relTol);
  for (std::size_t i = 0; i < kDim; ++i) {
    ynew[i].store(blk.ynew + i * st + lane);
    k[6][i].store(blk.k7 + i * st + lane);
  }
  err.store(blk.err + lane);
}

}  // namespace hardexc::detail
