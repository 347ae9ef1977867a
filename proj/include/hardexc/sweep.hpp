#pragma once

// Parameter sweeps over (Omega1, Omega2): cold-start and hysteresis
// protocols, jump detection, threshold maps, and a deterministic parallel
// engine with checkpoint/resume.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hardexc/integrate.hpp"
#include "hardexc/kernels.hpp"
#include "hardexc/model.hpp"

namespace hardexc {

enum class Protocol { coldStart, sweepUp, sweepDown };
enum class Spacing { linear, log };

std::string_view protocol_name(Protocol p);
Protocol parse_protocol(std::string_view name);
std::string_view spacing_name(Spacing s);
Spacing parse_spacing(std::string_view name);

struct Axis {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 2;
  Spacing spacing = Spacing::linear;

  void validate(const char* name) const;
  std::vector<double> values() const;
};

struct SweepPlan {
  Axis omega1;
  /// Either an Omega2 axis or an explicit list (a single 0 if both empty).
  std::optional<Axis> omega2;
  std::vector<double> omega2Values;
  Protocol protocol = Protocol::coldStart;
  IntegratorConfig integrator;
  /// Amplitude floor applied to a2 and b before every point: the plane
  /// a2 = b = 0 is invariant without a seed, so an exactly zero start could
  /// never leave it.
  double fluctuation = 1.0;
  double jumpFactor = 1e3;
  std::size_t workers = 0;  // 0: hardware concurrency
  kernels::Isa isa = kernels::default_isa();
  std::string checkpoint;  // directory; empty disables checkpointing
  /// Testing hook: stop scheduling after this many tasks (0: never).
  std::size_t stopAfter = 0;

  void validate() const;
  std::vector<double> omega1_grid() const { return omega1.values(); }
  std::vector<double> omega2_grid() const;
};

struct SweepPoint {
  double Omega1 = 0.0;
  double Omega2 = 0.0;
  /// Settled intensities, or window means if the point did not settle.
  std::array<double, 3> intensity{};
  bool settled = false;
  Termination reason = Termination::maxTime;
  ModeState state;
  double wallTime = 0.0;  // s; not part of equality

  friend bool operator==(const SweepPoint& a, const SweepPoint& b) {
    return a.Omega1 == b.Omega1 && a.Omega2 == b.Omega2 &&
           a.intensity == b.intensity && a.settled == b.settled &&
           a.reason == b.reason && a.state == b.state;
  }
};

struct SweepResult {
  std::vector<double> omega1;
  std::vector<double> omega2;
  /// Row-major: points[r * omega1.size() + i].
  std::vector<SweepPoint> points;
  /// Per row: grid steps k with a jump between omega1[k] and omega1[k+1].
  std::vector<std::vector<std::size_t>> jumps;
  bool complete = false;
  std::size_t tasksDone = 0;
  std::size_t tasksTotal = 0;

  const SweepPoint& at(std::size_t row, std::size_t i) const {
    return points[row * omega1.size() + i];
  }
  std::vector<double> row_ib(std::size_t row) const;
  /// omega1 just after the first jump of a row, if any.
  std::optional<double> first_jump(std::size_t row) const;

  friend bool operator==(const SweepResult& a, const SweepResult& b) {
    return a.omega1 == b.omega1 && a.omega2 == b.omega2 &&
           a.points == b.points && a.jumps == b.jumps &&
           a.complete == b.complete;
  }
};

/// Steps k where ib[k+1] >= factor * max(ib[k], floorFraction * max(ib)).
/// The floor keeps round-off growth of a vanishing |b|^2 from counting.
std::vector<std::size_t> detect_jump(const std::vector<double>& ib,
                                     double factor = 1e3,
                                     double floorFraction = 1e-4);

/// Raises |a2| and |b| to at least eps (phases kept; zero becomes eps).
ModeState with_floor(ModeState s, double eps);

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs (or resumes) the plan.  Results do not depend on the worker count
/// or on interruptions.  Per-point failures are reported in-band.
SweepResult run_sweep(const SweepPlan& plan, const SystemParams& sys,
                      const Detunings& det);

struct ThresholdRow {
  double Omega2 = 0.0;
  std::optional<double> jumpOmega1;
  /// Omega1^2 + Omega2^2 at the jump.
  std::optional<double> combined;
};

struct ThresholdMap {
  std::vector<ThresholdRow> rows;
  /// jumpOmega1 non-increasing over rows that have a jump.
  bool nonIncreasing = true;
  std::size_t rowsWithJump = 0;
};

ThresholdMap threshold_map(const SweepResult& result);
ThresholdMap threshold_map(const SweepPlan& plan, const SystemParams& sys,
                           const Detunings& det);

/// Long format: Omega1, Omega2, I1, I2, Ib, settled.
void write_sweep_csv(std::ostream& os, const SweepResult& r);
void write_threshold_csv(std::ostream& os, const ThresholdMap& m);

/// Stable identity of a plan plus parameters, used to guard resumes.
std::string sweep_fingerprint(const SweepPlan& plan, const SystemParams& sys,
                              const Detunings& det);

}  // namespace hardexc
