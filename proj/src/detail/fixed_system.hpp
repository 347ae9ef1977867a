#pragma once

// Residual system shared by Newton and continuation.  Unknowns are the six
// real state coordinates, plus nu for relative equilibria; the extra
// equation pins Im b = 0.

#include <cmath>
#include <vector>

#include "hardexc/steady.hpp"
#include "detail/dp5.hpp"

namespace hardexc::detail {

struct FixedSystem {
  SystemParams sys;
  Detunings det;
  DriveParams drive;
  bool relative = false;
  double rateScale = 1.0;  // weight of the pin row

  FixedSystem(const SystemParams& s, const Detunings& d, const DriveParams& dr,
              bool rel)
      : sys(s), det(d), drive(dr), relative(rel), rateScale(max_rate(s, d)) {}

  int size() const { return relative ? 7 : 6; }

  void eval(const double* z, double* F) const {
    const auto c = make_coeffs<double>(sys.gamma1, sys.gamma2, sys.gammaB,
                                       det.dOmega1, det.Delta2, det.dOmegaB,
                                       sys.g, drive.Omega1, drive.Omega2);
    rotating_rhs(c, z, F);
    if (relative) {
      const double nu = z[6];
      F[2] += -nu * z[3];
      F[3] += nu * z[2];
      F[4] += nu * z[5];
      F[5] += -nu * z[4];
      F[6] = rateScale * z[5];
    }
  }

  linalg::Matrix jac(const double* z) const {
    const int n = size();
    linalg::Matrix J(n, n);
    const ModeState s = from_real(z);
    const linalg::Matrix J6 =
        relative ? rotating_jacobian(s, sys, det, z[6]) : jacobian(s, sys, det);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) J(i, j) = J6(i, j);
    if (relative) {
      J(2, 6) = -z[3];
      J(3, 6) = z[2];
      J(4, 6) = z[5];
      J(5, 6) = -z[4];
      J(6, 5) = rateScale;
    }
    return J;
  }

  /// d F / d Omega1.
  std::vector<double> dparam() const {
    std::vector<double> d(size(), 0.0);
    d[1] = -1.0;
    return d;
  }

  double norm_of(const double* F) const {
    double s = 0.0;
    for (int i = 0; i < size(); ++i) s += F[i] * F[i];
    return std::sqrt(s);
  }

  double relative_norm(const double* z, const double* F) const {
    return norm_of(F) / residual_scale(from_real(z), sys, det);
  }
};

}  // namespace hardexc::detail
