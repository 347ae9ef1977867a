#include "hardexc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

namespace hardexc {

std::string_view stability_name(Stability s) {
  switch (s) {
    case Stability::stable:
      return "stable";
    case Stability::unstable:
      return "unstable";
    case Stability::marginal:
      break;
  }
  return "marginal";
}

StabilityReport analyze(const FixedPoint& fp, const SystemParams& sys,
                        const Detunings& det) {
  if (!fp.converged)
    throw std::invalid_argument("analyze: fixed point not converged");
  const linalg::Matrix J =
      fp.relative ? rotating_jacobian(fp.state, sys, det, fp.rotation)
                  : jacobian(fp.state, sys, det);
  auto ev = linalg::eigenvalues(J);
  std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });

  StabilityReport r;
  const double jn = std::max(J.norm_inf(), 1e-300);
  for (int i = 0; i < 6; ++i) {
    r.eigenvalues[i] = ev[i];
    const auto v = linalg::eigenvector(J, ev[i]);
    const double res = linalg::eigen_residual(J, ev[i], v) / jn;
    r.maxEigenResidual = std::max(r.maxEigenResidual, res);
  }
  if (!(r.maxEigenResidual <= 1e-8))
    throw linalg::EigenError("eigenpair residual check failed");

  if (fp.relative) {
    int idx = 0;
    for (int i = 1; i < 6; ++i)
      if (std::abs(ev[i]) < std::abs(ev[idx])) idx = i;
    r.gaugeIndex = idx;
  }
  r.spectralAbscissa = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i) {
    if (i == r.gaugeIndex) continue;
    if (ev[i].real() > r.spectralAbscissa) {
      r.spectralAbscissa = ev[i].real();
      r.leastStableIndex = i;
    }
  }
  const double band = 1e-12 * max_rate(sys, det);
  if (r.spectralAbscissa < -band)
    r.classification = Stability::stable;
  else if (r.spectralAbscissa > band)
    r.classification = Stability::unstable;
  else
    r.classification = Stability::marginal;
  r.stable = r.classification == Stability::stable;
  return r;
}

ThresholdSet thresholds(const SystemParams& sys, const Detunings& det) {
  const double G = sys.gamma2 + sys.gammaB;
  const double Q = det.dOmegaB / G;
  const double pre = std::sqrt(sys.gammaB * sys.gamma2) / std::abs(sys.g);
  ThresholdSet t;
  t.OmegaEx = pre * std::abs(det.dOmega1 + Q * sys.gamma1);
  t.OmegaTh = pre * std::sqrt((sys.gamma1 * sys.gamma1 +
                               det.dOmega1 * det.dOmega1) *
                              (1.0 + Q * Q));
  t.hardMode = det.dOmega1 * det.dOmegaB > sys.gamma1 * G;
  return t;
}

Interval bistable_region(const SystemParams& sys, const Detunings& det) {
  const ThresholdSet t = thresholds(sys, det);
  Interval iv;
  if (!t.hardMode) return iv;
  iv.lo = t.OmegaEx;
  iv.hi = t.OmegaTh;
  iv.empty = false;
  return iv;
}

void write_stability_header(std::ostream& os) {
  os << "Omega1,Omega2";
  for (int i = 0; i < 6; ++i) os << ",re_l" << i << ",im_l" << i;
  os << ",abscissa,class\n";
}

void write_stability_row(std::ostream& os, double Omega1, double Omega2,
                         const StabilityReport& r) {
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  put(Omega1);
  os << ',';
  put(Omega2);
  for (const auto& l : r.eigenvalues) {
    os << ',';
    put(l.real());
    os << ',';
    put(l.imag());
  }
  os << ',';
  put(r.spectralAbscissa);
  os << ',' << stability_name(r.classification) << '\n';
}


std::vector<SpectrumPoint> low_branch_spectrum(
    const std::vector<DriveParams>& path, const SystemParams& sys,
    const Detunings& det, const NewtonOptions& opt) {
  std::vector<SpectrumPoint> out;
  if (path.empty()) return out;
  ModeState guess;
  guess.a1 = Complex(0.0, -path[0].Omega1) / Complex(sys.gamma1, det.dOmega1);
  guess.a2 = Complex(0.0, -path[0].Omega2) / Complex(sys.gamma2, det.Delta2);
  NewtonOptions o = opt;
  o.mode = SolveMode::fixed;
  for (const DriveParams& d : path) {
    FixedPoint fp = newton_solve(guess, sys, det, d, o);
    if (!fp.converged || fp.branch != Branch::low) break;
    out.push_back({d, fp, analyze(fp, sys, det)});
    guess = fp.state;
  }
  return out;
}

std::optional<SpectrumPoint> seeded_low_branch(const SystemParams& sys,
                                               const Detunings& det,
                                               const DriveParams& drive,
                                               std::size_t steps,
                                               const NewtonOptions& opt) {
  if (steps == 0) steps = 1;
  std::vector<DriveParams> path;
  for (std::size_t k = 0; k <= steps; ++k) {
    DriveParams d = drive;
    d.Omega2 = k == steps ? drive.Omega2
                          : drive.Omega2 * static_cast<double>(k) /
                                static_cast<double>(steps);
    path.push_back(d);
  }
  auto pts = low_branch_spectrum(path, sys, det, opt);
  if (pts.size() != path.size()) return std::nullopt;
  return pts.back();
}

}  // namespace hardexc
