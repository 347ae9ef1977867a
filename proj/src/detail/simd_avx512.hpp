#pragma once

// Eight-lane double wrapper; include only from AVX-512F translation units.

#include <immintrin.h>

namespace hardexc::detail {

struct F64x8 {
  __m512d v;
  F64x8() = default;
  explicit F64x8(double s) : v(_mm512_set1_pd(s)) {}
  F64x8(__m512d x) : v(x) {}

  static F64x8 load(const double* p) { return _mm512_loadu_pd(p); }
  void store(double* p) const { _mm512_storeu_pd(p, v); }
};

inline F64x8 operator+(F64x8 a, F64x8 b) { return _mm512_add_pd(a.v, b.v); }
inline F64x8 operator-(F64x8 a, F64x8 b) { return _mm512_sub_pd(a.v, b.v); }
inline F64x8 operator*(F64x8 a, F64x8 b) { return _mm512_mul_pd(a.v, b.v); }
inline F64x8 operator/(F64x8 a, F64x8 b) { return _mm512_div_pd(a.v, b.v); }
inline F64x8 vsqrt(F64x8 a) { return _mm512_sqrt_pd(a.v); }
inline F64x8 vmax(F64x8 a, F64x8 b) { return _mm512_max_pd(a.v, b.v); }

}  // namespace hardexc::detail
