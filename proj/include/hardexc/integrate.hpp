#pragma once

// Adaptive Dormand-Prince 5(4) integration with dense output, steady-state
// detection on mode intensities, and a lane-batched settle for sweeps.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "hardexc/kernels.hpp"
#include "hardexc/model.hpp"

namespace hardexc {

enum class Frame { lab, rotating };

/// A right-hand side tagged with the frame it lives in.
struct FrameRhs {
  Frame frame = Frame::rotating;
  SystemParams sys;
  Detunings det;
  DriveParams drive;

  static FrameRhs rotating(const SystemParams& sys, const Detunings& det,
                           const DriveParams& drive);
  static FrameRhs lab(const SystemParams& sys, const DriveParams& drive);

  ModeState eval(double t, const ModeState& s) const;
  /// Largest linear rate in the system; sets the initial step.
  double rate_scale() const;
};

struct IntegratorConfig {
  double relTol = 1e-9;
  double absTol = 1e-6;
  double dtInit = 0.0;  // 0: derived from the fastest linear rate
  double dtMax = 0.0;   // 0: follows the local spectral radius
  std::size_t maxSteps = 100'000'000;
  double steadyWindow = 20.0;  // in units of 1/min(gamma)
  double steadyEps = 1e-9;
  bool detectSteady = true;
  double settleCap = 1000.0;  // settle horizon, in units of 1/min(gamma)
  double sampleStride = 0.0;  // s; 0 records every accepted step

  void validate() const;
};

enum class Termination { steady, maxTime, maxSteps, overflow, stepUnderflow };

std::string_view termination_name(Termination t);
Termination parse_termination(std::string_view name);

/// The amplitude magnitude treated as divergence.
inline constexpr double kOverflowAmplitude = 1e30;

/// Raised by integrate() when the step size underflows.
class StiffnessError : public NumericError {
 public:
  using NumericError::NumericError;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ModeState> states;
  std::vector<std::array<double, 3>> intensities;
  Termination reason = Termination::maxTime;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

Trajectory integrate(const FrameRhs& rhs, const ModeState& init, double tEnd,
                     const IntegratorConfig& cfg);

struct SettleResult {
  ModeState state;
  bool settled = false;
  Termination reason = Termination::maxTime;
  double t = 0.0;
  std::size_t steps = 0;
  /// Time-averaged intensities over the last complete detection window
  /// (equal to the final intensities once settled).
  std::array<double, 3> meanIntensity{};

  friend bool operator==(const SettleResult&, const SettleResult&) = default;
};

/// Integrates up to cfg.settleCap / min(gamma), stopping early when steady.
SettleResult settle(const FrameRhs& rhs, const ModeState& init,
                    const IntegratorConfig& cfg);

/// Settles many rotating-frame problems that share `sys` and `det`, packing
/// them into SIMD lanes.  Entry i is bit-identical to
/// settle(FrameRhs::rotating(sys, det, drives[i]), inits[i], cfg) for every
/// ISA; step-size underflow is reported in-band instead of thrown.
std::vector<SettleResult> settle_batch(const SystemParams& sys,
                                       const Detunings& det,
                                       std::span<const DriveParams> drives,
                                       std::span<const ModeState> inits,
                                       const IntegratorConfig& cfg,
                                       kernels::Isa isa);

/// Columns t, re/im of a1, a2, b, then |a1|^2, |a2|^2, |b|^2.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace hardexc
