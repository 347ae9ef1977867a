#pragma once

// Stationary states of the rotating-frame equations: residuals, the analytic
// Jacobian, damped Newton, the analytic zero-generation branch, and
// pseudo-arclength continuation in the pump amplitude.
//
// With no seed (Omega2 = 0) the generating solutions are not fixed points of
// the rotating frame: the joint phase of (a2, b) drifts at a constant rate
// nu, a2 ~ e^{-i nu t}, b ~ e^{+i nu t}, while all intensities stay
// constant.  Those states are solved as relative equilibria with nu as an
// extra unknown and Im b = 0 pinning the phase.

#include <array>
#include <iosfwd>
#include <limits>
#include <string_view>
#include <vector>

#include "hardexc/linalg.hpp"
#include "hardexc/model.hpp"

namespace hardexc {

enum class Branch { low, high, unresolved };

std::string_view branch_name(Branch b);
Branch parse_branch(std::string_view name);

struct FixedPoint {
  ModeState state;
  /// ||residual||_2 / (1 + maxRate * ||state||).
  double residualNorm = std::numeric_limits<double>::infinity();
  Branch branch = Branch::unresolved;
  bool converged = false;
  int iterations = 0;
  /// True for a relative equilibrium (see above); `rotation` is then nu.
  bool relative = false;
  double rotation = 0.0;
};

using Residual = std::array<double, 6>;

/// Real/imag parts of the three rotating-frame right-hand sides.
Residual residual(const ModeState& state, const SystemParams& sys,
                  const Detunings& det, const DriveParams& drive);

/// Largest linear rate: decays and detunings.
double max_rate(const SystemParams& sys, const Detunings& det);

/// Normalization used for residualNorm.
double residual_scale(const ModeState& state, const SystemParams& sys,
                      const Detunings& det);

/// Analytic Jacobian of rhs_rotating in (Re a1, Im a1, Re a2, Im a2, Re b,
/// Im b).  It does not depend on the drive.
linalg::Matrix jacobian(const ModeState& state, const SystemParams& sys,
                        const Detunings& det);

/// Jacobian of the co-rotating equations solved for relative equilibria:
/// jacobian() plus the nu-rotation terms.
linalg::Matrix rotating_jacobian(const ModeState& state, const SystemParams& sys,
                                 const Detunings& det, double nu);

/// Phonon intensity marking the generating branch, used for branch labels:
/// the phonon intensity at the fold of the unseeded generating branch in
/// the hard regime, gamma1 * gamma2 / g^2 otherwise.
double generation_intensity(const SystemParams& sys, const Detunings& det);

/// low / high label of a (converged) state; see generation_intensity().
Branch classify_branch(const ModeState& state, bool relative,
                       const SystemParams& sys, const Detunings& det);

enum class SolveMode { automatic, fixed, relative };

struct NewtonOptions {
  double tol = 1e-10;
  int maxIter = 50;
  int maxHalvings = 20;
  SolveMode mode = SolveMode::automatic;
  double nuGuess = std::numeric_limits<double>::quiet_NaN();
};

/// Damped Newton from `guess`.  In automatic mode, Omega2 == 0 and a guess
/// carrying phonon intensity above 1e-8 * max(|a1|^2, 1) select the
/// relative-equilibrium system.  Singular Jacobians and stalled line
/// searches give a non-converged, unresolved FixedPoint.
FixedPoint newton_solve(const ModeState& guess, const SystemParams& sys,
                        const Detunings& det, const DriveParams& drive,
                        const NewtonOptions& opt = {});

/// a1 = -i Omega1 / (gamma1 + i dOmega1), a2 = b = 0.  Requires Omega2 == 0.
FixedPoint analytic_low_branch(const SystemParams& sys, const Detunings& det,
                               const DriveParams& drive);

class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct StepControl {
  double Omega1Min = 0.0;
  double Omega1Max = 0.0;
  // Arclength steps, relative to (Omega1Max - Omega1Min).
  double ds = 1e-2;
  double dsMin = 1e-9;
  double dsMax = 2e-2;
  int direction = +1;  // initial sense of Omega1
  int maxPoints = 20000;
  NewtonOptions newton;
};

struct BranchPoint {
  double Omega1 = 0.0;
  FixedPoint fp;
};

enum class CurveEnd { range, maxPoints, truncated };

struct BranchCurve {
  double Omega2 = 0.0;
  std::vector<BranchPoint> points;
  /// Omega1 at detected turning points (interpolated between samples).
  std::vector<double> turningPoints;
  CurveEnd end = CurveEnd::range;
};

/// Pseudo-arclength continuation in Omega1 at fixed drive.Omega2, starting
/// from a converged point at drive.Omega1.  End points stay inside
/// [Omega1Min, Omega1Max]; a curve that cannot be continued is returned
/// truncated.
BranchCurve continue_branch(const FixedPoint& start, const SystemParams& sys,
                            const Detunings& det, const DriveParams& drive,
                            const StepControl& ctl);

/// Natural-parameter tracking: Newton at each Omega1 in `grid`, seeded from
/// the previous solution.  Stops at the first failure.
BranchCurve track_branch(const FixedPoint& start, const SystemParams& sys,
                         const Detunings& det, const DriveParams& drive,
                         const std::vector<double>& grid,
                         const NewtonOptions& opt = {});

/// Columns Omega1, re/im of a1, a2, b, the three intensities, branch,
/// residual norm.
void write_branch_csv(std::ostream& os, const BranchCurve& curve);

}  // namespace hardexc
