#include <algorithm>
#include <cmath>
#include <vector>

#include "detail/fixed_system.hpp"
#include "hardexc/steady.hpp"

namespace hardexc {

namespace {

// Unknowns scaled to O(1): u = (z / w, Omega1 / Ps).
class Arclength {
 public:
  Arclength(detail::FixedSystem fs, std::vector<double> w, double fscale,
            double tol)
      : fs_(std::move(fs)), w_(std::move(w)), fscale_(fscale), tol_(tol),
        n_(fs_.size()) {}

  int n() const { return n_; }

  void unpack(const std::vector<double>& u, double* z, double& O1) const {
    for (int i = 0; i < n_; ++i) z[i] = u[i] * w_[i];
    O1 = u[n_] * w_[n_];
  }

  std::vector<double> pack(const double* z, double O1) const {
    std::vector<double> u(n_ + 1);
    for (int i = 0; i < n_; ++i) u[i] = z[i] / w_[i];
    u[n_] = O1 / w_[n_];
    return u;
  }

  // F in scaled form plus the relative residual norm.
  double eval(const std::vector<double>& u, std::vector<double>& F) {
    double z[7], O1, raw[7];
    unpack(u, z, O1);
    fs_.drive.Omega1 = O1;
    fs_.eval(z, raw);
    F.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) F[i] = raw[i] / fscale_;
    return fs_.relative_norm(z, raw);
  }

  // n x (n+1) Jacobian in scaled variables, with `extra` as the last row.
  linalg::Matrix bordered(const std::vector<double>& u,
                          const std::vector<double>& extra) {
    double z[7], O1;
    unpack(u, z, O1);
    fs_.drive.Omega1 = O1;
    const linalg::Matrix J = fs_.jac(z);
    const auto dp = fs_.dparam();
    linalg::Matrix B(n_ + 1, n_ + 1);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) B(i, j) = J(i, j) * w_[j] / fscale_;
      B(i, n_) = dp[i] * w_[n_] / fscale_;
    }
    for (int j = 0; j <= n_; ++j) B(n_, j) = extra[j];
    return B;
  }

  bool tangent(const std::vector<double>& u, const std::vector<double>& prev,
               std::vector<double>& t) {
    const linalg::Lu lu(bordered(u, prev));
    if (lu.singular()) return false;
    std::vector<double> rhs(n_ + 1, 0.0);
    rhs[n_] = 1.0;
    t = lu.solve(rhs);
    double s = 0.0;
    for (double v : t) s += v * v;
    s = std::sqrt(s);
    if (!(s > 0.0) || !std::isfinite(s)) return false;
    for (double& v : t) v /= s;
    return true;
  }

  struct Corrected {
    bool ok = false;
    std::vector<double> u;
    int iterations = 0;
  };

  Corrected correct(const std::vector<double>& u0,
                    const std::vector<double>& t0, double ds) {
    Corrected c;
    c.u.resize(n_ + 1);
    for (int i = 0; i <= n_; ++i) c.u[i] = u0[i] + ds * t0[i];
    std::vector<double> F;
    for (int it = 0; it < 12; ++it) {
      const double rel = eval(c.u, F);
      if (!std::isfinite(rel)) return c;
      double arc = -ds;
      for (int i = 0; i <= n_; ++i) arc += t0[i] * (c.u[i] - u0[i]);
      if (rel <= tol_ && std::abs(arc) <= 1e-9 * std::max(ds, 1e-12)) {
        c.ok = true;
        c.iterations = it;
        return c;
      }
      const linalg::Lu lu(bordered(c.u, t0));
      if (lu.singular()) return c;
      std::vector<double> rhs(n_ + 1);
      for (int i = 0; i < n_; ++i) rhs[i] = -F[i];
      rhs[n_] = -arc;
      const auto du = lu.solve(rhs);
      for (int i = 0; i <= n_; ++i) c.u[i] += du[i];
    }
    return c;
  }

  detail::FixedSystem& system() { return fs_; }

 private:
  detail::FixedSystem fs_;
  std::vector<double> w_;
  double fscale_;
  double tol_;
  int n_;
};

FixedPoint polish(const double* z, bool relative, double O1,
                  const SystemParams& sys, const Detunings& det,
                  DriveParams drive, NewtonOptions opt) {
  drive.Omega1 = O1;
  opt.mode = relative ? SolveMode::relative : SolveMode::fixed;
  opt.nuGuess = relative ? z[6] : opt.nuGuess;
  return newton_solve(from_real(z), sys, det, drive, opt);
}

}  // namespace

BranchCurve continue_branch(const FixedPoint& start, const SystemParams& sys,
                            const Detunings& det, const DriveParams& drive,
                            const StepControl& ctl) {
  if (!start.converged)
    throw std::invalid_argument("continue_branch: start not converged");
  if (!(ctl.Omega1Max > ctl.Omega1Min))
    throw std::invalid_argument("continue_branch: empty Omega1 range");
  if (!(ctl.dsMin > 0.0 && ctl.dsMin <= ctl.ds && ctl.ds <= ctl.dsMax))
    throw std::invalid_argument("continue_branch: need 0 < dsMin <= ds <= dsMax");

  BranchCurve curve;
  curve.Omega2 = drive.Omega2;
  curve.points.push_back({drive.Omega1, start});

  detail::FixedSystem fs(sys, det, drive, start.relative);
  const int n = fs.size();
  const double Ps = ctl.Omega1Max - ctl.Omega1Min;
  const double Xs = std::max(
      start.state.norm(), Ps / std::abs(Complex(sys.gamma1, det.dOmega1)));
  std::vector<double> w(n + 1, Xs);
  if (start.relative) w[6] = fs.rateScale;
  w[n] = Ps;
  Arclength al(fs, w, fs.rateScale * Xs, ctl.newton.tol);

  double z0[7] = {};
  to_real(start.state, z0);
  if (start.relative) z0[6] = start.rotation;
  std::vector<double> u0 = al.pack(z0, drive.Omega1);

  std::vector<double> e(n + 1, 0.0), t0;
  e[n] = 1.0;
  if (!al.tangent(u0, e, t0)) {
    curve.end = CurveEnd::truncated;
    return curve;
  }
  if ((ctl.direction >= 0) != (t0[n] >= 0.0))
    for (double& v : t0) v = -v;

  const double genScale = generation_intensity(sys, det);
  double ds = ctl.ds;
  while (true) {
    if (static_cast<int>(curve.points.size()) >= ctl.maxPoints) {
      curve.end = CurveEnd::maxPoints;
      break;
    }
    auto c = al.correct(u0, t0, ds);
    std::vector<double> t1;
    FixedPoint fp;
    double z[7], O1 = 0.0;
    bool ok = c.ok && al.tangent(c.u, t0, t1);
    if (ok) {
      al.unpack(c.u, z, O1);
      if (O1 < ctl.Omega1Min || O1 > ctl.Omega1Max) {
        // Land on the boundary with a natural-parameter solve.
        const double edge = O1 < ctl.Omega1Min ? ctl.Omega1Min : ctl.Omega1Max;
        double zl[7];
        al.unpack(u0, zl, O1);
        fp = polish(zl, start.relative, edge, sys, det, drive, ctl.newton);
        if (fp.converged) curve.points.push_back({edge, fp});
        curve.end = CurveEnd::range;
        break;
      }
      fp = polish(z, start.relative, O1, sys, det, drive, ctl.newton);
      ok = fp.converged;
    }
    if (!ok) {
      ds *= 0.5;
      if (ds < ctl.dsMin) {
        curve.end = CurveEnd::truncated;
        break;
      }
      continue;
    }

    if (start.relative && fp.state.b.real() * start.state.b.real() <= 0.0) {
      // b went through zero: the rotating solution met the a2 = b = 0
      // branch and continues as its own gauge image.
      curve.end = CurveEnd::truncated;
      break;
    }

    if (t0[n] * t1[n] < 0.0) {
      // Bisect on the arclength for the zero of dOmega1/ds.
      double lo = 0.0, hi = ds, Oturn = O1;
      const bool startPositive = t0[n] > 0.0;
      for (int it = 0; it < 60 && hi - lo > 1e-13 * ds; ++it) {
        const double mid = 0.5 * (lo + hi);
        auto cm = al.correct(u0, t0, mid);
        std::vector<double> tm;
        if (!cm.ok || !al.tangent(cm.u, t0, tm)) break;
        double zm[7];
        al.unpack(cm.u, zm, Oturn);
        if ((tm[n] > 0.0) == startPositive)
          lo = mid;
        else
          hi = mid;
      }
      curve.turningPoints.push_back(Oturn);
    }

    curve.points.push_back({O1, fp});
    if (start.relative && fp.state.ib() < 1e-12 * genScale) {
      // The rotating solution has merged into the a2 = b = 0 branch.
      curve.end = CurveEnd::truncated;
      break;
    }
    if (c.iterations <= 3)
      ds = std::min(ds * 1.5, ctl.dsMax);
    else if (c.iterations >= 7)
      ds = std::max(ds * 0.5, ctl.dsMin);
    double zp[7];
    to_real(fp.state, zp);
    if (start.relative) zp[6] = fp.rotation;
    u0 = al.pack(zp, O1);
    t0 = std::move(t1);
  }
  return curve;
}

BranchCurve track_branch(const FixedPoint& start, const SystemParams& sys,
                         const Detunings& det, const DriveParams& drive,
                         const std::vector<double>& grid,
                         const NewtonOptions& opt) {
  BranchCurve curve;
  curve.Omega2 = drive.Omega2;
  FixedPoint prev = start;
  for (double O1 : grid) {
    double z[7] = {};
    to_real(prev.state, z);
    if (prev.relative) z[6] = prev.rotation;
    FixedPoint fp = polish(z, prev.relative, O1, sys, det, drive, opt);
    if (!fp.converged) {
      curve.end = CurveEnd::truncated;
      return curve;
    }
    curve.points.push_back({O1, fp});
    prev = fp;
  }
  curve.end = CurveEnd::range;
  return curve;
}

}  // namespace hardexc
