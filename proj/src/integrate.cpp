#include "hardexc/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "detail/dp5.hpp"
#include "detail/stepping.hpp"

namespace hardexc {

FrameRhs FrameRhs::rotating(const SystemParams& sys, const Detunings& det,
                            const DriveParams& drive) {
  return FrameRhs{Frame::rotating, sys, det, drive};
}

FrameRhs FrameRhs::lab(const SystemParams& sys, const DriveParams& drive) {
  return FrameRhs{Frame::lab, sys, Detunings::from(sys, drive), drive};
}

ModeState FrameRhs::eval(double t, const ModeState& s) const {
  return frame == Frame::lab ? rhs_lab(s, t, sys, drive)
                             : rhs_rotating(s, sys, det, drive);
}

double FrameRhs::rate_scale() const {
  double r = std::max({sys.gamma1, sys.gamma2, sys.gammaB});
  if (frame == Frame::lab) {
    r = std::max({r, std::abs(sys.omega1), std::abs(sys.omega2),
                  std::abs(sys.omegaB)});
  } else {
    r = std::max({r, std::abs(det.dOmega1), std::abs(det.Delta2),
                  std::abs(det.dOmegaB)});
  }
  return r;
}

void IntegratorConfig::validate() const {
  if (!(relTol > 0.0) || !(absTol > 0.0))
    throw std::invalid_argument("relTol and absTol must be > 0");
  if (maxSteps < 1) throw std::invalid_argument("maxSteps must be >= 1");
  if (!(steadyEps > 0.0)) throw std::invalid_argument("steadyEps must be > 0");
  if (!(steadyWindow > 0.0))
    throw std::invalid_argument("steadyWindow must be > 0");
  if (!(dtMax >= 0.0)) throw std::invalid_argument("dtMax must be >= 0");
  if (dtInit < 0.0 || sampleStride < 0.0 || !(settleCap > 0.0))
    throw std::invalid_argument("negative step, stride or settle cap");
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::steady:
      return "steady";
    case Termination::maxTime:
      return "maxTime";
    case Termination::maxSteps:
      return "maxSteps";
    case Termination::overflow:
      return "overflow";
    case Termination::stepUnderflow:
      return "stepUnderflow";
  }
  return "unknown";
}

Termination parse_termination(std::string_view name) {
  for (Termination t :
       {Termination::steady, Termination::maxTime, Termination::maxSteps,
        Termination::overflow, Termination::stepUnderflow})
    if (termination_name(t) == name) return t;
  throw std::invalid_argument("unknown termination '" + std::string(name) +
                              "'");
}

namespace {

// Quartic continuous extension of the Dormand-Prince pair; row j weights
// stage j by (theta, theta^2, theta^3, theta^4).
constexpr double kDense[7][4] = {
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0,
     69997945.0 / 29380423.0}};

void dense_eval(const double* y0, const double (*k)[6], double h,
                double theta, double* out) {
  const double th[4] = {theta, theta * theta, theta * theta * theta,
                        theta * theta * theta * theta};
  for (int i = 0; i < 6; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 7; ++j) {
      const double w = kDense[j][0] * th[0] + kDense[j][1] * th[1] +
                       kDense[j][2] * th[2] + kDense[j][3] * th[3];
      acc += w * k[j][i];
    }
    out[i] = y0[i] + h * acc;
  }
}

// Steps near the stability boundary of the fastest local rotation make the
// controller ring at the tolerance level and hide steady states, so the
// default cap follows the local spectral radius.
detail::LaneLimits limits(const FrameRhs& rhs, const IntegratorConfig& cfg) {
  detail::LaneLimits lim{cfg.dtMax, cfg.maxSteps, cfg.detectSteady};
  if (!(cfg.dtMax > 0.0)) {
    lim.dtMax = std::numeric_limits<double>::infinity();
    lim.autoRate = rhs.rate_scale();
    lim.autoCoupling = std::abs(rhs.sys.g);
  }
  return lim;
}

double initial_step(const FrameRhs& rhs, const IntegratorConfig& cfg,
                    const double* y0, double tEnd) {
  double h = cfg.dtInit > 0.0 ? cfg.dtInit : 1e-3 / rhs.rate_scale();
  return std::min({h, detail::step_cap(limits(rhs, cfg), y0), tEnd});
}

detail::RotatingCoeffs<double> coeffs_of(const FrameRhs& rhs) {
  return detail::make_coeffs<double>(
      rhs.sys.gamma1, rhs.sys.gamma2, rhs.sys.gammaB, rhs.det.dOmega1,
      rhs.det.Delta2, rhs.det.dOmegaB, rhs.sys.g, rhs.drive.Omega1,
      rhs.drive.Omega2);
}

void init_lane(detail::Lane& lane, const FrameRhs& rhs, const ModeState& init,
               double tEnd, const IntegratorConfig& cfg) {
  lane = detail::Lane{};
  lane.tEnd = tEnd;
  to_real(init, lane.y);
  lane.h = initial_step(rhs, cfg, lane.y, tEnd);
  lane.window = detail::SteadyWindow(cfg.steadyWindow / rhs.sys.min_rate(),
                                     cfg.steadyEps, cfg.absTol * cfg.absTol);
  lane.window.start(0.0, lane.y);
}

void check_inputs(const FrameRhs& rhs, const ModeState& init,
                  const IntegratorConfig& cfg, double tEnd) {
  cfg.validate();
  rhs.sys.validate_integrable();
  rhs.drive.validate();
  if (rhs.frame == Frame::lab) rhs.sys.validate_lab();
  if (!init.finite()) throw NumericError("numeric overflow: initial state");
  if (!(tEnd > 0.0) || !std::isfinite(tEnd))
    throw std::invalid_argument("tEnd must be finite and > 0");
}

// Runs one lane to completion; `on_step` sees every accepted step with the
// step start, step size and stage derivatives for dense output.
template <class OnStep>
void run_lane(detail::Lane& lane, const FrameRhs& rhs,
              const IntegratorConfig& cfg, OnStep&& on_step) {
  const auto lim = limits(rhs, cfg);
  const auto c = coeffs_of(rhs);
  const bool rotating = rhs.frame == Frame::rotating;
  auto f = [&](double t, const double* in, double* out) {
    if (rotating) {
      detail::rotating_rhs(c, in, out);
    } else {
      to_real(rhs_lab(from_real(in), t, rhs.sys, rhs.drive), out);
    }
  };
  f(lane.t, lane.y, lane.k1);

  double ynew[6], k[7][6], y0[6];
  while (!lane.done) {
    const double h = detail::clipped_step(lane);
    const double t0 = lane.t;
    const double err = detail::dp5_trial<double>(f, t0, h, lane.y, lane.k1,
                                                 ynew, k, cfg.absTol,
                                                 cfg.relTol);
    std::copy(lane.y, lane.y + 6, y0);
    const auto res = detail::advance(lane, h, ynew, k[6], err, lim);
    if (res == detail::StepResult::accepted) on_step(t0, h, y0, k);
  }
}

}  // namespace

Trajectory integrate(const FrameRhs& rhs, const ModeState& init, double tEnd,
                     const IntegratorConfig& cfg) {
  check_inputs(rhs, init, cfg, tEnd);
  detail::Lane lane;
  init_lane(lane, rhs, init, tEnd, cfg);

  Trajectory traj;
  auto record = [&traj](double t, const double* y) {
    const ModeState s = from_real(y);
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.intensities.push_back({s.i1(), s.i2(), s.ib()});
  };
  record(0.0, lane.y);
  double nextSample = cfg.sampleStride;
  std::size_t sampleIndex = 1;

  run_lane(lane, rhs, cfg,
           [&](double t0, double h, const double* y0, const double (*k)[6]) {
             if (cfg.sampleStride <= 0.0) {
               record(lane.t, lane.y);
               return;
             }
             double out[6];
             while (nextSample < lane.t) {
               dense_eval(y0, k, h, (nextSample - t0) / h, out);
               record(nextSample, out);
               nextSample = cfg.sampleStride * double(++sampleIndex);
             }
           });
  if (traj.times.back() < lane.t) record(lane.t, lane.y);

  traj.reason = lane.reason;
  traj.accepted = lane.accepted;
  traj.rejected = lane.rejected;
  if (lane.reason == Termination::stepUnderflow)
    throw StiffnessError("step size underflow at t = " +
                         std::to_string(lane.t) +
                         " s: problem too stiff for the explicit integrator");
  return traj;
}

namespace {

SettleResult finish(const detail::Lane& lane) {
  SettleResult r;
  r.state = from_real(lane.y);
  r.reason = lane.reason;
  r.settled = lane.reason == Termination::steady;
  r.t = lane.t;
  r.steps = lane.accepted;
  if (r.settled || !lane.window.has_mean()) {
    r.meanIntensity = {r.state.i1(), r.state.i2(), r.state.ib()};
  } else {
    const double* m = lane.window.mean();
    r.meanIntensity = {m[0], m[1], m[2]};
  }
  return r;
}

}  // namespace

SettleResult settle(const FrameRhs& rhs, const ModeState& init,
                    const IntegratorConfig& cfg) {
  const double tEnd = cfg.settleCap / rhs.sys.min_rate();
  check_inputs(rhs, init, cfg, tEnd);
  detail::Lane lane;
  init_lane(lane, rhs, init, tEnd, cfg);
  run_lane(lane, rhs, cfg, [](double, double, const double*,
                              const double (*)[6]) {});
  if (lane.reason == Termination::stepUnderflow)
    throw StiffnessError("step size underflow while settling");
  return finish(lane);
}

std::vector<SettleResult> settle_batch(const SystemParams& sys,
                                       const Detunings& det,
                                       std::span<const DriveParams> drives,
                                       std::span<const ModeState> inits,
                                       const IntegratorConfig& cfg,
                                       kernels::Isa isa) {
  if (drives.size() != inits.size())
    throw std::invalid_argument("settle_batch: drives/inits size mismatch");
  cfg.validate();
  sys.validate();
  for (const auto& d : drives) d.validate();
  for (const auto& s : inits)
    if (!s.finite()) throw NumericError("numeric overflow: initial state");

  const std::size_t n = drives.size();
  std::vector<SettleResult> out(n);
  if (n == 0) return out;

  const std::size_t width = kernels::lane_width(isa);
  // Enough lanes to keep the vector units busy while stragglers finish.
  const std::size_t lanes =
      std::min(n, std::max<std::size_t>(2 * width, 8));
  const std::size_t stride = (lanes + 7) / 8 * 8;
  const double tEnd = cfg.settleCap / sys.min_rate();
  const auto lim = limits(FrameRhs::rotating(sys, det, drives[0]), cfg);

  std::vector<double> coeff(kernels::kCoeffs * stride, 0.0);
  std::vector<double> y(6 * stride, 0.0), k1(6 * stride, 0.0),
      ynew(6 * stride, 0.0), k7(6 * stride, 0.0), h(stride, 0.0),
      err(stride, 0.0);
  std::vector<detail::Lane> lane(lanes);
  std::vector<std::size_t> owner(lanes, n);  // problem index per lane
  std::size_t next = 0, remaining = n;

  auto load = [&](std::size_t l) {
    if (next >= n) {
      owner[l] = n;
      return;
    }
    const std::size_t p = next++;
    owner[l] = p;
    const FrameRhs rhs = FrameRhs::rotating(sys, det, drives[p]);
    init_lane(lane[l], rhs, inits[p], tEnd, cfg);
    const double v[kernels::kCoeffs] = {
        sys.gamma1, sys.gamma2, sys.gammaB, det.dOmega1,   det.Delta2,
        det.dOmegaB, sys.g,     drives[p].Omega1, drives[p].Omega2};
    for (std::size_t c = 0; c < kernels::kCoeffs; ++c)
      coeff[c * stride + l] = v[c];
    const auto cs = coeffs_of(rhs);
    detail::rotating_rhs(cs, lane[l].y, lane[l].k1);
  };
  for (std::size_t l = 0; l < lanes; ++l) load(l);

  kernels::LaneBlock blk;
  blk.lanes = lanes;
  blk.stride = stride;
  blk.coeff = coeff.data();
  blk.y = y.data();
  blk.k1 = k1.data();
  blk.h = h.data();
  blk.ynew = ynew.data();
  blk.k7 = k7.data();
  blk.err = err.data();
  blk.absTol = cfg.absTol;
  blk.relTol = cfg.relTol;

  while (remaining > 0) {
    for (std::size_t l = 0; l < lanes; ++l) {
      const bool active = owner[l] < n;
      h[l] = active ? detail::clipped_step(lane[l]) : 0.0;
      for (int i = 0; i < 6; ++i) {
        y[i * stride + l] = lane[l].y[i];
        k1[i * stride + l] = lane[l].k1[i];
      }
    }
    kernels::dp5_trial(isa, blk);
    for (std::size_t l = 0; l < lanes; ++l) {
      if (owner[l] >= n) continue;
      double yn[6], kk[6];
      for (int i = 0; i < 6; ++i) {
        yn[i] = ynew[i * stride + l];
        kk[i] = k7[i * stride + l];
      }
      detail::advance(lane[l], h[l], yn, kk, err[l], lim);
      if (lane[l].done) {
        out[owner[l]] = finish(lane[l]);
        --remaining;
        load(l);
      }
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,re_a1,im_a1,re_a2,im_a2,re_b,im_b,I1,I2,Ib\n";
  char buf[512];
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const ModeState& s = traj.states[i];
    const auto& in = traj.intensities[i];
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  traj.times[i], s.a1.real(), s.a1.imag(), s.a2.real(),
                  s.a2.imag(), s.b.real(), s.b.imag(), in[0], in[1], in[2]);
    os << buf;
  }
}

}  // namespace hardexc
