#include <doctest.h>

#include <random>

#include "hardexc/integrate.hpp"
#include "hardexc/stability.hpp"
#include "hardexc/steady.hpp"
#include "support.hpp"

using namespace hardexc;
using testing::rel;

namespace {

SystemParams small_lab(double gamma, double g) {
  SystemParams s;
  s.gamma1 = s.gamma2 = s.gammaB = gamma;
  s.omega1 = 3.0;
  s.omega2 = 2.0;
  s.omegaB = 1.0;
  s.g = g;
  return s;
}

IntegratorConfig tight() {
  IntegratorConfig c;
  c.relTol = 1e-12;
  c.absTol = 1e-14;
  c.detectSteady = false;
  return c;
}

}  // namespace

TEST_SUITE("integrate") {

TEST_CASE("uncoupled decay is exponential") {
  SystemParams s;
  s.gamma1 = 1.0;
  s.gamma2 = 1.0;
  s.gammaB = 1.0;
  s.g = 0.0;
  const Detunings det = Detunings::direct(0.0, 0.0);
  IntegratorConfig cfg;
  cfg.relTol = 1e-10;
  cfg.absTol = 1e-12;
  cfg.detectSteady = false;
  const Trajectory tr = integrate(FrameRhs::rotating(s, det, {}),
                                  {{1.0, 0.0}, {}, {}}, 1.0, cfg);
  CHECK(tr.reason == Termination::maxTime);
  CHECK(tr.times.back() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rel(tr.intensities.back()[0], std::exp(-2.0)) <= 1e-8);
}

TEST_CASE("undriven undamped motion conserves energy and both charges") {
  const SystemParams s = small_lab(0.0, 0.2);
  const ModeState init{{0.3, 0.1}, {1.0, -0.2}, {0.8, 0.4}};
  const double T = 1000.0 * kTwoPi / s.omegaB;
  IntegratorConfig cfg = tight();
  cfg.sampleStride = T / 500.0;
  const Trajectory tr = integrate(FrameRhs::lab(s, {}), init, T, cfg);
  REQUIRE(tr.reason == Termination::maxTime);
  const Charges c0 = energy_and_charges(init, s);
  double dE = 0, d12 = 0, d2b = 0, swing = 0;
  for (const auto& st : tr.states) {
    const Charges c = energy_and_charges(st, s);
    dE = std::max(dE, rel(c.energy, c0.energy));
    d12 = std::max(d12, rel(c.n12, c0.n12));
    d2b = std::max(d2b, rel(c.n2b, c0.n2b));
    swing = std::max(swing, std::abs(st.i1() - init.i1()));
  }
  CHECK(swing > 0.1);  // energy really is exchanged
  CHECK(dE <= 1e-8);
  CHECK(d12 <= 1e-8);
  CHECK(d2b <= 1e-8);
}

TEST_CASE("lab and rotating frames agree") {
  SystemParams s = small_lab(0.1, 0.2);
  s.gammaB = 0.3;
  DriveParams d;
  d.omegaPump = 2.9;
  d.Omega1 = 0.5;
  d.Omega2 = 0.1;
  const Detunings det = Detunings::from(s, d);
  IntegratorConfig cfg;
  cfg.relTol = 1e-10;
  cfg.absTol = 1e-12;
  cfg.detectSteady = false;
  const ModeState init{{0.1, 0.0}, {0.2, 0.1}, {0.0, 0.3}};
  const double T = 20.0;
  const Trajectory lab = integrate(FrameRhs::lab(s, d), init, T, cfg);
  const Trajectory rot = integrate(FrameRhs::rotating(s, det, d),
                                   to_rotating(init, 0.0, d, s), T, cfg);
  const ModeState a = to_rotating(lab.states.back(), lab.times.back(), d, s);
  const ModeState b = rot.states.back();
  const double tol = 10.0 * (cfg.relTol * b.norm() + cfg.absTol);
  CHECK((a - b).norm() <= tol);
}

TEST_CASE("trajectory structure") {
  const auto sys = testing::fig2_system();
  const auto det = testing::fig2_detunings();
  DriveParams d;
  d.Omega1 = 1e16;
  IntegratorConfig cfg;
  cfg.detectSteady = false;
  const double T = 5.0 / sys.gamma1;
  cfg.sampleStride = T / 50.0;
  const Trajectory tr = integrate(FrameRhs::rotating(sys, det, d),
                                  {{}, {1.0, 0.0}, {1.0, 0.0}}, T, cfg);
  REQUIRE(tr.times.size() >= 50);
  for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    CHECK(tr.intensities[i][0] == tr.states[i].i1());
    CHECK(tr.intensities[i][1] == tr.states[i].i2());
    CHECK(tr.intensities[i][2] == tr.states[i].ib());
  }
  CHECK(tr.times[10] == doctest::Approx(10.0 * cfg.sampleStride).epsilon(1e-14));
}

TEST_CASE("termination reasons") {
  const auto sys = testing::fig2_system();
  const auto det = testing::fig2_detunings();
  IntegratorConfig cfg;
  cfg.maxSteps = 10;
  cfg.detectSteady = false;
  auto tr = integrate(FrameRhs::rotating(sys, det, {}), {{1.0, 0.0}, {}, {}},
                      1.0 / sys.gamma1, cfg);
  CHECK(tr.reason == Termination::maxSteps);

  IntegratorConfig big;
  big.detectSteady = false;
  big.maxSteps = 100000;
  DriveParams huge;
  huge.Omega1 = 1e45;
  tr = integrate(FrameRhs::rotating(sys, det, huge), {}, 1.0 / sys.gamma1, big);
  CHECK(tr.reason == Termination::overflow);

  ModeState bad;
  bad.a1 = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(integrate(FrameRhs::rotating(sys, det, {}), bad, 1.0, cfg),
                  NumericError);
  IntegratorConfig neg;
  neg.relTol = -1.0;
  CHECK_THROWS(integrate(FrameRhs::rotating(sys, det, {}), {}, 1.0, neg));
}

TEST_CASE("undriven settle reaches the origin") {
  const auto sys = testing::fig2_system();
  const auto det = testing::fig2_detunings();
  IntegratorConfig cfg;
  SettleResult r = settle(FrameRhs::rotating(sys, det, {}), {}, cfg);
  CHECK(r.settled);
  CHECK(r.state == ModeState{});
  r = settle(FrameRhs::rotating(sys, det, {}), {{3.0, 1.0}, {-2.0, 0.5}, {1.0, 1.0}}, cfg);
  CHECK(r.settled);
  CHECK(r.state.i1() < cfg.absTol);
  CHECK(r.state.i2() < cfg.absTol);
  CHECK(r.state.ib() < cfg.absTol);
}

TEST_CASE("cold start below the jump stays on the low branch") {
  const auto sys = testing::fig2_system();
  const auto det = testing::fig2_detunings();
  DriveParams d;
  d.Omega1 = 0.5 * thresholds(sys, det).OmegaTh;
  const SettleResult r = settle(FrameRhs::rotating(sys, det, d),
                                {{}, {1.0, 0.0}, {1.0, 0.0}}, {});
  REQUIRE(r.settled);
  const double low = d.Omega1 * d.Omega1 /
                     (sys.gamma1 * sys.gamma1 + det.dOmega1 * det.dOmega1);
  CHECK(rel(r.state.i1(), low) <= 1e-6);
  CHECK(r.state.i2() < 1e-6 * r.state.i1());
  CHECK(r.state.ib() < 1e-6 * r.state.i1());
}

TEST_CASE("cold start above threshold settles on the generating state") {
  const auto sys = testing::fig2_system();
  const auto det = testing::fig2_detunings();
  DriveParams d;
  d.Omega1 = 1.1 * thresholds(sys, det).OmegaTh;
  const SettleResult r = settle(FrameRhs::rotating(sys, det, d),
                                {{}, {1.0, 0.0}, {1.0, 0.0}}, {});
  REQUIRE(r.settled);
  CHECK(r.reason == Termination::steady);
  testing::HighBranch hb;
  REQUIRE(testing::hand_high_branch(sys, det, d.Omega1, true, hb));
  CHECK(rel(r.state.i1(), hb.state.i1()) <= 1e-6);
  CHECK(rel(r.state.i2(), hb.state.i2()) <= 1e-6);
  CHECK(rel(r.state.ib(), hb.state.ib()) <= 1e-6);
}

TEST_CASE("batched settles are bit-identical to single settles on every ISA") {
  const auto sys = testing::fig2_system();
  const auto det = testing::fig2_detunings();
  const double th = thresholds(sys, det).OmegaTh;
  std::vector<DriveParams> drives;
  std::vector<ModeState> inits;
  for (int k = 0; k < 11; ++k) {
    DriveParams d;
    d.Omega1 = th * (0.1 * k + 0.05);
    d.Omega2 = (k % 3) * 1e-3 * th;
    drives.push_back(d);
    inits.push_back({{}, {1.0, 0.0}, {1.0, 0.0}});
  }
  IntegratorConfig cfg;
  cfg.settleCap = 30.0;
  std::vector<SettleResult> single;
  for (std::size_t i = 0; i < drives.size(); ++i)
    single.push_back(settle(FrameRhs::rotating(sys, det, drives[i]), inits[i], cfg));
  for (auto isa : {kernels::Isa::scalar, kernels::Isa::avx2, kernels::Isa::avx512}) {
    if (!kernels::isa_supported(isa)) continue;
    CAPTURE(kernels::isa_name(isa));
    const auto batch = settle_batch(sys, det, drives, inits, cfg, isa);
    REQUIRE(batch.size() == single.size());
    for (std::size_t i = 0; i < single.size(); ++i) CHECK(batch[i] == single[i]);
  }
}

}
