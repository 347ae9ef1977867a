#pragma once

// Dormand-Prince 5(4) trial step written once over an abstract lane type V.
// V is `double` for the scalar path or a thin wrapper over an AVX register.
// The expression text below fixes the evaluation order for every V.

#include <cmath>

namespace hardexc::detail {

inline double vsqrt(double x) { return std::sqrt(x); }
// Matches the x86 max instruction: the second operand wins on NaN.
inline double vmax(double a, double b) { return a > b ? a : b; }

namespace dp5 {
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                        c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0,
                        a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                        a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0,
                        b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                        b6 = 11.0 / 84.0;
// Difference between the 5th- and embedded 4th-order weights.
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                        e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                        e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
}  // namespace dp5

template <class V>
struct RotatingCoeffs {
  V ng1, ng2, ngb;  // negated decay rates
  V d1, nd1, D2, nD2, db, ndb;
  V g, O1, O2;
};

template <class V>
inline RotatingCoeffs<V> make_coeffs(V gamma1, V gamma2, V gammaB, V dOmega1,
                                     V Delta2, V dOmegaB, V g, V Omega1,
                                     V Omega2) {
  const V zero(0.0);
  return RotatingCoeffs<V>{zero - gamma1, zero - gamma2, zero - gammaB,
                           dOmega1,       zero - dOmega1, Delta2,
                           zero - Delta2,  dOmegaB,       zero - dOmegaB,
                           g,              Omega1,        Omega2};
}

/// Real-coordinate rotating-frame right-hand side.
template <class V>
inline void rotating_rhs(const RotatingCoeffs<V>& c, const V* in, V* out) {
  const V x = in[0], y = in[1], p = in[2], q = in[3], r = in[4], s = in[5];
  out[0] = (c.ng1 * x + c.d1 * y) + c.g * (p * s + q * r);
  out[1] = ((c.nd1 * x + c.ng1 * y) - c.g * (p * r - q * s)) - c.O1;
  out[2] = (c.ng2 * p + c.D2 * q) + c.g * (y * r - x * s);
  out[3] = ((c.nD2 * p + c.ng2 * q) - c.g * (x * r + y * s)) - c.O2;
  out[4] = (c.ngb * r + c.db * s) + c.g * (y * p - x * q);
  out[5] = (c.ndb * r + c.ngb * s) - c.g * (x * p + y * q);
}

/// One trial step from (t, y) with step h; k1 = f(t, y).  Writes the
/// 5th-order solution to ynew and all seven stage derivatives to k (the
/// seventh being f(t + h, ynew)).  Returns the max over the three complex
/// components of |err| / (absTol + relTol * max(|y|, |ynew|)).
template <class V, class Rhs>
inline V dp5_trial(Rhs&& f, V t, V h, const V* y, const V* k1, V* ynew,
                   V (*k)[6], double absTol, double relTol) {
  using namespace dp5;
  V yt[6];
  for (int i = 0; i < 6; ++i) k[0][i] = k1[i];

  for (int i = 0; i < 6; ++i) yt[i] = y[i] + h * (V(a21) * k[0][i]);
  f(t + V(c2) * h, yt, k[1]);
  for (int i = 0; i < 6; ++i)
    yt[i] = y[i] + h * (V(a31) * k[0][i] + V(a32) * k[1][i]);
  f(t + V(c3) * h, yt, k[2]);
  for (int i = 0; i < 6; ++i)
    yt[i] = y[i] + h * (V(a41) * k[0][i] + V(a42) * k[1][i] +
                        V(a43) * k[2][i]);
  f(t + V(c4) * h, yt, k[3]);
  for (int i = 0; i < 6; ++i)
    yt[i] = y[i] + h * (V(a51) * k[0][i] + V(a52) * k[1][i] +
                        V(a53) * k[2][i] + V(a54) * k[3][i]);
  f(t + V(c5) * h, yt, k[4]);
  for (int i = 0; i < 6; ++i)
    yt[i] = y[i] + h * (V(a61) * k[0][i] + V(a62) * k[1][i] +
                        V(a63) * k[2][i] + V(a64) * k[3][i] +
                        V(a65) * k[4][i]);
  f(t + h, yt, k[5]);
  for (int i = 0; i < 6; ++i)
    ynew[i] = y[i] + h * (V(b1) * k[0][i] + V(b3) * k[2][i] +
                          V(b4) * k[3][i] + V(b5) * k[4][i] +
                          V(b6) * k[5][i]);
  f(t + h, ynew, k[6]);

  V err(0.0);
  for (int j = 0; j < 3; ++j) {
    V e[2];
    for (int m = 0; m < 2; ++m) {
      const int i = 2 * j + m;
      e[m] = h * (V(e1) * k[0][i] + V(e3) * k[2][i] + V(e4) * k[3][i] +
                  V(e5) * k[4][i] + V(e6) * k[5][i] + V(e7) * k[6][i]);
    }
    const V en = vsqrt(e[0] * e[0] + e[1] * e[1]);
    const V m0 = vsqrt(y[2 * j] * y[2 * j] + y[2 * j + 1] * y[2 * j + 1]);
    const V m1 = vsqrt(ynew[2 * j] * ynew[2 * j] +
                       ynew[2 * j + 1] * ynew[2 * j + 1]);
    const V sc = V(absTol) + V(relTol) * vmax(m0, m1);
    err = vmax(err, en / sc);
  }
  return err;
}

}  // namespace hardexc::detail
