#pragma once

// Per-lane step acceptance, step-size control and steady detection.  Both
// the single-trajectory integrator and the batched settle drive lanes
// through this code, which is what keeps them bit-identical.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "hardexc/integrate.hpp"

namespace hardexc::detail {

/// Tumbling windows over accepted steps.  A window that spans at least
/// `length` seconds and in which every intensity stayed within
/// eps * max + floor marks the problem as steady.
class SteadyWindow {
 public:
  SteadyWindow() = default;
  SteadyWindow(double length, double eps, double floor)
      : length_(length), eps_(eps), floor_(floor) {}

  void start(double t, const double* y) {
    t0_ = t;
    last_t_ = t;
    intensities(y, last_);
    for (int i = 0; i < 3; ++i) lo_[i] = hi_[i] = last_[i], sum_[i] = 0.0;
  }

  /// Returns true when the window that just closed was steady.
  bool add(double t, const double* y) {
    double cur[3];
    intensities(y, cur);
    const double dt = t - last_t_;
    for (int i = 0; i < 3; ++i) {
      lo_[i] = std::min(lo_[i], cur[i]);
      hi_[i] = std::max(hi_[i], cur[i]);
      sum_[i] += 0.5 * (cur[i] + last_[i]) * dt;
      last_[i] = cur[i];
    }
    last_t_ = t;
    if (t - t0_ < length_) return false;
    bool steady = true;
    for (int i = 0; i < 3; ++i) {
      mean_[i] = sum_[i] / (t - t0_);
      if (hi_[i] - lo_[i] > eps_ * hi_[i] + floor_) steady = false;
    }
    has_mean_ = true;
    start(t, y);
    return steady;
  }

  bool has_mean() const { return has_mean_; }
  const double* mean() const { return mean_; }

 private:
  static void intensities(const double* y, double* out) {
    for (int i = 0; i < 3; ++i)
      out[i] = y[2 * i] * y[2 * i] + y[2 * i + 1] * y[2 * i + 1];
  }

  double length_ = 0.0, eps_ = 0.0, floor_ = 0.0;
  double t0_ = 0.0, last_t_ = 0.0;
  double lo_[3]{}, hi_[3]{}, sum_[3]{}, last_[3]{}, mean_[3]{};
  bool has_mean_ = false;
};

struct Lane {
  double t = 0.0;
  double h = 0.0;
  double tEnd = 0.0;
  double y[6]{};
  double k1[6]{};
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  bool done = false;
  Termination reason = Termination::maxTime;
  SteadyWindow window;
};

struct LaneLimits {
  double dtMax;
  std::size_t maxSteps;
  bool detectSteady;
  // Automatic cap when > 0: h <= 1 / (rate + |g| (|a1| + |a2| + |b|)), a
  // bound on the local Jacobian's spectral radius.
  double autoRate = 0.0;
  double autoCoupling = 0.0;
};

/// Largest step allowed from state y.
inline double step_cap(const LaneLimits& lim, const double* y) {
  if (!(lim.autoRate > 0.0)) return lim.dtMax;
  double amp = 0.0;
  for (int i = 0; i < 3; ++i)
    amp += std::sqrt(y[2 * i] * y[2 * i] + y[2 * i + 1] * y[2 * i + 1]);
  return 1.0 / (lim.autoRate + lim.autoCoupling * amp);
}

inline constexpr double kSafety = 0.9;
inline constexpr double kMinFactor = 0.2;
inline constexpr double kMaxFactor = 5.0;

/// Step actually attempted from the lane's proposal.
inline double clipped_step(const Lane& lane) {
  return std::min(lane.h, lane.tEnd - lane.t);
}

inline bool overflowed(const double* y) {
  for (int i = 0; i < 6; ++i)
    if (!(std::abs(y[i]) <= kOverflowAmplitude)) return true;
  return false;
}

enum class StepResult { accepted, rejected, underflow };

/// Consumes one trial step (taken with step `h`).  On acceptance the lane
/// moves to (t + h, ynew) and may finish.
inline StepResult advance(Lane& lane, double h, const double* ynew,
                          const double* k7, double err,
                          const LaneLimits& lim) {
  const bool ok = err <= 1.0;
  double factor;
  if (!(err == err)) {
    factor = kMinFactor;
  } else if (err == 0.0) {
    factor = kMaxFactor;
  } else {
    factor = std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor);
  }
  if (!ok) {
    ++lane.rejected;
    lane.h = h * std::min(factor, 1.0);
    if (lane.h <= 16.0 * 2.220446049250313e-16 * std::abs(lane.t) ||
        lane.h < 1e-300) {
      lane.done = true;
      lane.reason = Termination::stepUnderflow;
      return StepResult::underflow;
    }
    if (lane.rejected + lane.accepted >= lim.maxSteps) {
      lane.done = true;
      lane.reason = Termination::maxSteps;
    }
    return StepResult::rejected;
  }

  const bool last = h == lane.tEnd - lane.t;
  lane.t = last ? lane.tEnd : lane.t + h;
  for (int i = 0; i < 6; ++i) {
    lane.y[i] = ynew[i];
    lane.k1[i] = k7[i];
  }
  ++lane.accepted;
  lane.h = std::min(h * factor, step_cap(lim, lane.y));

  if (overflowed(lane.y)) {
    lane.done = true;
    lane.reason = Termination::overflow;
  } else if (lim.detectSteady && lane.window.add(lane.t, lane.y)) {
    lane.done = true;
    lane.reason = Termination::steady;
  } else if (last) {
    lane.done = true;
    lane.reason = Termination::maxTime;
  } else if (lane.accepted + lane.rejected >= lim.maxSteps) {
    lane.done = true;
    lane.reason = Termination::maxSteps;
  }
  return StepResult::accepted;
}

}  // namespace hardexc::detail
