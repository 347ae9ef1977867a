#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "hardexc/model.hpp"

namespace testing {

using hardexc::Complex;
using hardexc::kTwoPi;

inline hardexc::SystemParams fig2_system() {
  hardexc::SystemParams s;
  s.gamma1 = kTwoPi * 19e6;
  s.gamma2 = kTwoPi * 19e6;
  s.gammaB = kTwoPi * 121e6;
  s.g = kTwoPi * 1.6e3;
  return s;
}

inline hardexc::Detunings fig2_detunings() {
  return hardexc::Detunings::direct(kTwoPi * -6e9, kTwoPi * -6e9);
}

inline hardexc::Detunings soft_detunings() {
  return hardexc::Detunings::direct(0.0, 0.0);
}

inline double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// Hand evaluation of the two threshold expressions, written out term by
// term without the library.
struct HandThresholds {
  double ex, th;
};

inline HandThresholds hand_thresholds(const hardexc::SystemParams& s,
                                      const hardexc::Detunings& d) {
  const double Q = d.dOmegaB / (s.gamma2 + s.gammaB);
  const double pre = std::sqrt(s.gammaB * s.gamma2) / std::abs(s.g);
  const double ex = pre * std::abs(d.dOmega1 + Q * s.gamma1);
  const double th = pre * std::sqrt((s.gamma1 * s.gamma1 + d.dOmega1 * d.dOmega1) *
                                    (1.0 + Q * Q));
  return {ex, th};
}

// Generating solution with Omega2 = 0, from the stationary equations with
// a2 ~ e^{-i nu t}, b ~ e^{i nu t}.  Returns false when Omega1 is outside
// the branch; `upper` picks the larger-|b| root.
struct HighBranch {
  hardexc::ModeState state;
  double nu = 0.0;
};

inline bool hand_high_branch(const hardexc::SystemParams& s,
                             const hardexc::Detunings& d, double Omega1,
                             bool upper, HighBranch& out) {
  const double g1 = s.gamma1, g2 = s.gamma2, gb = s.gammaB, g = s.g;
  const double d1 = d.dOmega1;
  const double Q = d.dOmegaB / (g2 + gb);
  const double Ith = g2 * gb * (1.0 + Q * Q) / (g * g);
  // (1+Q^2) k^2 + 2 (g1 - Q d1) k + (g1^2 + d1^2) - Omega1^2 / Ith = 0
  const double A = 1.0 + Q * Q;
  const double B = 2.0 * (g1 - Q * d1);
  const double C = g1 * g1 + d1 * d1 - Omega1 * Omega1 / Ith;
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return false;
  const double k = (-B + (upper ? 1.0 : -1.0) * std::sqrt(disc)) / (2.0 * A);
  if (!(k > 0.0)) return false;
  const double bAbs = std::sqrt(k * g2 * (1.0 + Q * Q)) / std::abs(g);
  hardexc::ModeState st;
  st.b = Complex(bAbs, 0.0);
  st.a1 = Complex(0.0, -Omega1) / Complex(g1 + k, d1 - Q * k);
  st.a2 = Complex(0.0, g) * st.a1 * std::conj(st.b) / Complex(-g2, -g2 * Q);
  out.state = st;
  out.nu = -g2 * Q;
  return true;
}

}  // namespace testing
