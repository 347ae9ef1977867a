#pragma once

// Four-lane double wrapper used to instantiate the stepping templates.
// Only include from translation units compiled with AVX2 enabled.

#include <immintrin.h>

namespace hardexc::detail {

struct F64x4 {
  __m256d v;
  F64x4() = default;
  explicit F64x4(double s) : v(_mm256_set1_pd(s)) {}
  F64x4(__m256d x) : v(x) {}

  static F64x4 load(const double* p) { return _mm256_loadu_pd(p); }
  void store(double* p) const { _mm256_storeu_pd(p, v); }
};

inline F64x4 operator+(F64x4 a, F64x4 b) { return _mm256_add_pd(a.v, b.v); }
inline F64x4 operator-(F64x4 a, F64x4 b) { return _mm256_sub_pd(a.v, b.v); }
inline F64x4 operator*(F64x4 a, F64x4 b) { return _mm256_mul_pd(a.v, b.v); }
inline F64x4 operator/(F64x4 a, F64x4 b) { return _mm256_div_pd(a.v, b.v); }
inline F64x4 vsqrt(F64x4 a) { return _mm256_sqrt_pd(a.v); }
// (a > b) ? a : b per lane, same NaN behaviour as the scalar vmax.
inline F64x4 vmax(F64x4 a, F64x4 b) { return _mm256_max_pd(a.v, b.v); }

}  // namespace hardexc::detail
