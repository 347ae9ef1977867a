#include <doctest.h>

#include <random>
#include <sstream>

#include "hardexc/integrate.hpp"
#include "hardexc/stability.hpp"
#include "hardexc/steady.hpp"
#include "support.hpp"

using namespace hardexc;
using testing::rel;

namespace {

const SystemParams kSys = testing::fig2_system();
const Detunings kDet = testing::fig2_detunings();
const double kTh = thresholds(kSys, kDet).OmegaTh;
const double kEx = thresholds(kSys, kDet).OmegaEx;

DriveParams pump(double rel1, double rel2 = 0.0) {
  DriveParams d;
  d.Omega1 = rel1 * kTh;
  d.Omega2 = rel2 * kTh;
  return d;
}

ModeState low_state(double Omega1) {
  ModeState s;
  s.a1 = Complex(0.0, -Omega1) / Complex(kSys.gamma1, kDet.dOmega1);
  return s;
}

linalg::Matrix fd_jacobian(const ModeState& s, const DriveParams& d) {
  double x[6];
  to_real(s, x);
  const double h = 1e-6 * (1.0 + s.norm());
  linalg::Matrix j(6, 6);
  for (int c = 0; c < 6; ++c) {
    double xp[6], xm[6];
    std::copy(x, x + 6, xp);
    std::copy(x, x + 6, xm);
    xp[c] += h;
    xm[c] -= h;
    const Residual fp = residual(from_real(xp), kSys, kDet, d);
    const Residual fm = residual(from_real(xm), kSys, kDet, d);
    for (int r = 0; r < 6; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
  }
  return j;
}

}  // namespace

TEST_SUITE("steady") {

TEST_CASE("residual at the zero-generation state vanishes") {
  for (double r : {0.01, 0.3, 0.9, 1.5}) {
    const DriveParams d = pump(r);
    const Residual f = residual(low_state(d.Omega1), kSys, kDet, d);
    for (double v : f) CHECK(std::abs(v) <= 1e-15 * d.Omega1);
  }
}

TEST_CASE("residual at the origin") {
  const Residual z = residual({}, kSys, kDet, {});
  for (double v : z) CHECK(v == 0.0);
  DriveParams d;
  d.Omega1 = 2.0;
  const Residual f = residual({}, kSys, kDet, d);
  const Residual expect = {0.0, -2.0, 0.0, 0.0, 0.0, 0.0};
  CHECK(f == expect);
}

TEST_CASE("Jacobian matches central differences") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 30; ++k) {
    const double scale = std::pow(10.0, 3 + k % 5);
    const ModeState s{{scale * n(rng), scale * n(rng)},
                      {scale * n(rng), scale * n(rng)},
                      {scale * n(rng), scale * n(rng)}};
    const DriveParams d = pump(0.5, 0.01);
    const linalg::Matrix a = jacobian(s, kSys, kDet);
    const linalg::Matrix b = fd_jacobian(s, d);
    double worst = 0.0;
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
    CHECK(worst <= 1e-6 * a.norm_inf());
  }
}

TEST_CASE("uncoupled Jacobian is state independent") {
  SystemParams s = kSys;
  s.g = 0.0;
  const auto a = jacobian({}, s, kDet);
  const auto b = jacobian({{1e5, 2e5}, {3e4, -1e6}, {7.0, 8e5}}, s, kDet);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) CHECK(a(r, c) == b(r, c));
}

TEST_CASE("Newton from the root stops immediately") {
  const DriveParams d = pump(0.4);
  const FixedPoint fp = newton_solve(low_state(d.Omega1), kSys, kDet, d);
  CHECK(fp.converged);
  CHECK(fp.iterations <= 2);
  CHECK(fp.branch == Branch::low);
  CHECK_FALSE(fp.relative);
}

TEST_CASE("undriven Newton finds the origin from random guesses") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0.0, 1e3);
  for (int k = 0; k < 10; ++k) {
    const ModeState g{{n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}};
    NewtonOptions opt;
    opt.mode = SolveMode::fixed;
    const FixedPoint fp = newton_solve(g, kSys, kDet, {}, opt);
    REQUIRE(fp.converged);
    CHECK(fp.state.norm() <= 1e-9);
    CHECK_FALSE(linalg::Lu(jacobian(fp.state, kSys, kDet)).singular());
  }
}

TEST_CASE("analytic low branch") {
  SystemParams s = kSys;
  s.gamma1 = 1.0;
  DriveParams d;
  d.Omega1 = 1.0;
  const FixedPoint r = analytic_low_branch(s, Detunings::direct(0.0, kDet.dOmegaB), d);
  CHECK(std::abs(r.state.a1 - Complex(0.0, -1.0)) <= 1e-15);
  CHECK(r.state.i1() == doctest::Approx(1.0));

  CHECK(analytic_low_branch(kSys, kDet, {}).state == ModeState{});
  CHECK_THROWS_AS(analytic_low_branch(kSys, kDet, pump(0.5, 0.01)), ContractError);

  for (double x : {0.05, 0.3, 0.8, 1.1}) {
    const DriveParams dp = pump(x);
    const FixedPoint a = analytic_low_branch(kSys, kDet, dp);
    for (double v : residual(a.state, kSys, kDet, dp)) CHECK(std::abs(v) <= 1e-15 * dp.Omega1);
    ModeState guess = a.state;
    guess.a1 *= 1.01;
    const FixedPoint n = newton_solve(guess, kSys, kDet, dp);
    REQUIRE(n.converged);
    CHECK(std::abs(n.state.a1 - a.state.a1) <= 1e-10 * std::abs(a.state.a1));
    CHECK(n.state.ib() == 0.0);
  }
}

TEST_CASE("generating branch matches the closed-form solution") {
  for (double x : {0.05, 0.3, 0.6, 0.95}) {
    testing::HighBranch hb;
    REQUIRE(testing::hand_high_branch(kSys, kDet, x * kTh, true, hb));
    ModeState guess = hb.state;
    guess.a1 *= Complex(1.02, 0.01);
    guess.b *= 0.97;
    const FixedPoint fp = newton_solve(guess, kSys, kDet, pump(x));
    REQUIRE(fp.converged);
    CHECK(fp.relative);
    CHECK(fp.branch == Branch::high);
    CHECK(rel(fp.rotation, hb.nu) <= 1e-9);
    CHECK(rel(fp.state.i1(), hb.state.i1()) <= 1e-9);
    CHECK(rel(fp.state.i2(), hb.state.i2()) <= 1e-9);
    CHECK(rel(fp.state.ib(), hb.state.ib()) <= 1e-9);
  }
}

TEST_CASE("Newton from a settled integration lands on the generating branch") {
  const DriveParams d = pump(0.6);
  ModeState seed;
  seed.a2 = Complex(std::sqrt(1e12 * kSys.gammaB / kSys.gamma2), 0.0);
  seed.b = Complex(1e6, 0.0);
  const SettleResult s = settle(FrameRhs::rotating(kSys, kDet, d), seed, {});
  REQUIRE(s.settled);
  const FixedPoint fp = newton_solve(s.state, kSys, kDet, d);
  REQUIRE(fp.converged);
  CHECK(fp.branch == Branch::high);
  CHECK(fp.state.i2() > 0.0);
  CHECK(fp.state.ib() > 0.0);
}

TEST_CASE("continuation reproduces the zero-generation branch") {
  const DriveParams d = pump(0.1);
  StepControl ctl;
  ctl.Omega1Min = 0.0;
  ctl.Omega1Max = 1.2 * kTh;
  const BranchCurve c = continue_branch(analytic_low_branch(kSys, kDet, d), kSys, kDet, d, ctl);
  CHECK(c.end == CurveEnd::range);
  REQUIRE(c.points.size() > 10);
  CHECK(c.points.back().Omega1 == ctl.Omega1Max);
  CHECK(c.turningPoints.empty());
  for (const auto& p : c.points) {
    const double expect = p.Omega1 * p.Omega1 /
        (kSys.gamma1 * kSys.gamma1 + kDet.dOmega1 * kDet.dOmega1);
    CHECK(rel(p.fp.state.i1(), expect) <= 1e-12);
    CHECK(p.fp.state.ib() == 0.0);
  }
}

TEST_CASE("generating branch continued downward folds at the excitation threshold") {
  const DriveParams d = pump(0.5);
  testing::HighBranch hb;
  REQUIRE(testing::hand_high_branch(kSys, kDet, d.Omega1, true, hb));
  const FixedPoint start = newton_solve(hb.state, kSys, kDet, d);
  REQUIRE(start.converged);
  StepControl ctl;
  ctl.Omega1Min = 0.0;
  ctl.Omega1Max = 1.2 * kTh;
  ctl.direction = -1;
  const BranchCurve c = continue_branch(start, kSys, kDet, d, ctl);
  REQUIRE(c.turningPoints.size() >= 1);
  CHECK(rel(c.turningPoints.front(), kEx) <= 0.01);
  double lowest = c.points.front().Omega1;
  for (const auto& p : c.points) lowest = std::min(lowest, p.Omega1);
  CHECK(lowest >= kEx * 0.99);
}

TEST_CASE("seeded low branch is smooth and nonzero") {
  const DriveParams d = pump(0.7, 0.07);
  const auto start = seeded_low_branch(kSys, kDet, d);
  REQUIRE(start);
  StepControl ctl;
  ctl.Omega1Min = 0.0;
  ctl.Omega1Max = 1.2 * kTh;
  ctl.newton.mode = SolveMode::fixed;
  for (int dir : {+1, -1}) {
    ctl.direction = dir;
    const BranchCurve c = continue_branch(start->fp, kSys, kDet, d, ctl);
    CHECK(c.end == CurveEnd::range);
    REQUIRE(c.points.size() > 10);
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      const ModeState& s = c.points[i].fp.state;
      CHECK(s.i2() > 0.0);
      CHECK(s.ib() > 0.0);
      if (i == 0) continue;
      const ModeState& p = c.points[i - 1].fp.state;
      CHECK(rel(s.ib(), p.ib()) <= 0.2);
      CHECK(rel(s.i2(), p.i2()) <= 0.2);
    }
  }
}

TEST_CASE("natural tracking and CSV output") {
  const DriveParams d = pump(0.0);
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.1 * i * kTh);
  const BranchCurve c = track_branch(analytic_low_branch(kSys, kDet, d), kSys, kDet, d, grid);
  CHECK(c.end == CurveEnd::range);
  REQUIRE(c.points.size() == grid.size());
  std::ostringstream os;
  write_branch_csv(os, c);
  std::string header;
  std::istringstream is(os.str());
  std::getline(is, header);
  CHECK(header.rfind("Omega1,", 0) == 0);
  std::size_t lines = 0;
  for (std::string l; std::getline(is, l);) ++lines;
  CHECK(lines == grid.size());
}

TEST_CASE("branch labels") {
  CHECK(classify_branch(low_state(kTh), false, kSys, kDet) == Branch::low);
  testing::HighBranch hb;
  REQUIRE(testing::hand_high_branch(kSys, kDet, 0.5 * kTh, true, hb));
  CHECK(classify_branch(hb.state, false, kSys, kDet) == Branch::high);
  CHECK(parse_branch(branch_name(Branch::unresolved)) == Branch::unresolved);
}

}
