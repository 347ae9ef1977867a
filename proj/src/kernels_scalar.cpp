#include "detail/lane_kernel.hpp"

namespace hardexc::detail {
namespace {

struct F64x1 {
  double v;
  F64x1() = default;
  explicit F64x1(double s) : v(s) {}
  static F64x1 load(const double* p) { return F64x1(*p); }
  void store(double* p) const { *p = v; }
};

inline F64x1 operator+(F64x1 a, F64x1 b) { return F64x1(a.v + b.v); }
inline F64x1 operator-(F64x1 a, F64x1 b) { return F64x1(a.v - b.v); }
inline F64x1 operator*(F64x1 a, F64x1 b) { return F64x1(a.v * b.v); }
inline F64x1 operator/(F64x1 a, F64x1 b) { return F64x1(a.v / b.v); }
inline F64x1 vsqrt(F64x1 a) { return F64x1(hardexc::detail::vsqrt(a.v)); }
inline F64x1 vmax(F64x1 a, F64x1 b) { return F64x1(hardexc::detail::vmax(a.v, b.v)); }

}  // namespace
}  // namespace hardexc::detail

namespace hardexc::kernels::detail {

void dp5_trial_scalar(const LaneBlock& block, std::size_t begin,
                      std::size_t end) {
  for (std::size_t lane = begin; lane < end; ++lane)
    hardexc::detail::dp5_lane_group<hardexc::detail::F64x1>(block, lane);
}

}  // namespace hardexc::kernels::detail
