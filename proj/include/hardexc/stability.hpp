#pragma once

// Linear stability of stationary states and the closed-form excitation
// thresholds.

#include <array>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "hardexc/steady.hpp"

namespace hardexc {

enum class Stability { stable, unstable, marginal };

std::string_view stability_name(Stability s);

struct StabilityReport {
  /// Sorted by decreasing real part, then decreasing imaginary part.
  std::array<Complex, 6> eigenvalues{};
  /// Max real part, excluding the phase mode of a relative equilibrium.
  double spectralAbscissa = 0.0;
  bool stable = false;
  Stability classification = Stability::marginal;
  int leastStableIndex = 0;
  /// Index of the dropped phase mode, -1 for ordinary fixed points.
  int gaugeIndex = -1;
  /// Largest ||(J - lambda I) v|| / ||J|| over the eigenpairs.
  double maxEigenResidual = 0.0;
};

/// Eigen-decomposition of the linearization at `fp`.  Relative equilibria
/// are linearized in their co-rotating frame.  Throws linalg::EigenError if
/// the eigensolver fails or an eigenpair misses its residual check.
StabilityReport analyze(const FixedPoint& fp, const SystemParams& sys,
                        const Detunings& det);

struct ThresholdSet {
  double OmegaEx = 0.0;
  double OmegaTh = 0.0;
  bool hardMode = false;
};

/// Q = (dOmega2 + omegaB) / (gamma2 + gammaB), written via dOmegaB;
/// OmegaEx = sqrt(gB g2) / |g| * |dOmega1 + Q gamma1|,
/// OmegaTh = sqrt(gB g2) / |g| * sqrt((gamma1^2 + dOmega1^2)(1 + Q^2)),
/// hardMode iff dOmega1 * dOmegaB > gamma1 * (gamma2 + gammaB).
ThresholdSet thresholds(const SystemParams& sys, const Detunings& det);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = true;
  double width() const { return empty ? 0.0 : hi - lo; }
};

/// [OmegaEx, OmegaTh] in the hard regime, empty otherwise.
Interval bistable_region(const SystemParams& sys, const Detunings& det);

struct SpectrumPoint {
  DriveParams drive;
  FixedPoint fp;
  StabilityReport report;
};

/// Follows the low branch along a path of drives: Newton from the linear
/// response at path[0], then from the previous solution.  Stops before the
/// first point that fails to converge or lands on the high branch.
std::vector<SpectrumPoint> low_branch_spectrum(
    const std::vector<DriveParams>& path, const SystemParams& sys,
    const Detunings& det, const NewtonOptions& opt = {});

/// The low-intensity solution at `drive`: the zero-generation state at
/// Omega2 = 0 continued in Omega2 up to drive.Omega2 in `steps` equal
/// steps.  Empty when that continuation breaks down.
std::optional<SpectrumPoint> seeded_low_branch(const SystemParams& sys,
                                               const Detunings& det,
                                               const DriveParams& drive,
                                               std::size_t steps = 60,
                                               const NewtonOptions& opt = {});

/// Columns Omega1, Omega2, re/im of six eigenvalues, abscissa, class.
void write_stability_header(std::ostream& os);
void write_stability_row(std::ostream& os, double Omega1, double Omega2,
                         const StabilityReport& r);

}  // namespace hardexc
