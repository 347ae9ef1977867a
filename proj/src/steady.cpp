#include "hardexc/steady.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "detail/fixed_system.hpp"

namespace hardexc {

std::string_view branch_name(Branch b) {
  switch (b) {
    case Branch::low:
      return "low";
    case Branch::high:
      return "high";
    case Branch::unresolved:
      break;
  }
  return "unresolved";
}

Branch parse_branch(std::string_view name) {
  if (name == "low") return Branch::low;
  if (name == "high") return Branch::high;
  if (name == "unresolved") return Branch::unresolved;
  throw std::invalid_argument("unknown branch label: " + std::string(name));
}

Residual residual(const ModeState& state, const SystemParams& sys,
                  const Detunings& det, const DriveParams& drive) {
  Residual r;
  to_real(rhs_rotating(state, sys, det, drive), r.data());
  return r;
}

double max_rate(const SystemParams& sys, const Detunings& det) {
  return std::max({sys.gamma1, sys.gamma2, sys.gammaB, std::abs(det.dOmega1),
                   std::abs(det.Delta2), std::abs(det.dOmegaB)});
}

double residual_scale(const ModeState& state, const SystemParams& sys,
                      const Detunings& det) {
  return 1.0 + max_rate(sys, det) * state.norm();
}

linalg::Matrix jacobian(const ModeState& s, const SystemParams& sys,
                        const Detunings& det) {
  const double x = s.a1.real(), y = s.a1.imag();
  const double p = s.a2.real(), q = s.a2.imag();
  const double r = s.b.real(), t = s.b.imag();
  const double g = sys.g;
  const double g1 = sys.gamma1, g2 = sys.gamma2, gb = sys.gammaB;
  const double d1 = det.dOmega1, D2 = det.Delta2, db = det.dOmegaB;
  linalg::Matrix J(6, 6);
  const double rows[6][6] = {
      {-g1, d1, g * t, g * r, g * q, g * p},
      {-d1, -g1, -g * r, g * t, -g * p, g * q},
      {-g * t, g * r, -g2, D2, g * y, -g * x},
      {-g * r, -g * t, -D2, -g2, -g * x, -g * y},
      {-g * q, g * p, g * y, -g * x, -gb, db},
      {-g * p, -g * q, -g * x, -g * y, -db, -gb},
  };
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) J(i, j) = rows[i][j];
  return J;
}

linalg::Matrix rotating_jacobian(const ModeState& state,
                                 const SystemParams& sys, const Detunings& det,
                                 double nu) {
  linalg::Matrix J = jacobian(state, sys, det);
  J(2, 3) -= nu;
  J(3, 2) += nu;
  J(4, 5) += nu;
  J(5, 4) -= nu;
  return J;
}

double generation_intensity(const SystemParams& sys, const Detunings& det) {
  const double gsq = sys.g * sys.g;
  const double Q = det.dOmegaB / (sys.gamma2 + sys.gammaB);
  const double excess = Q * det.dOmega1 - sys.gamma1;
  if (excess > 0.0) return sys.gamma2 * excess / gsq;
  return sys.gamma1 * sys.gamma2 / gsq;
}

Branch classify_branch(const ModeState& state, bool relative,
                       const SystemParams& sys, const Detunings& det) {
  if (relative) return Branch::high;
  return state.ib() >= 0.5 * generation_intensity(sys, det) ? Branch::high
                                                            : Branch::low;
}

namespace {

bool all_finite(const double* v, int n) {
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

FixedPoint unresolved(const double* z, bool relative, int it, double norm) {
  FixedPoint fp;
  fp.state = from_real(z);
  fp.relative = relative;
  fp.rotation = relative ? z[6] : 0.0;
  fp.iterations = it;
  fp.residualNorm = norm;
  return fp;
}

}  // namespace

FixedPoint newton_solve(const ModeState& guess, const SystemParams& sys,
                        const Detunings& det, const DriveParams& drive,
                        const NewtonOptions& opt) {
  if (!(opt.tol > 0.0)) throw std::invalid_argument("newton: tol must be > 0");
  if (!guess.finite()) throw NumericError("newton: non-finite guess");

  bool relative = opt.mode == SolveMode::relative;
  if (opt.mode == SolveMode::automatic)
    relative = drive.Omega2 == 0.0 &&
               guess.ib() > 1e-8 * std::max(guess.i1(), 1.0);
  if (relative && drive.Omega2 != 0.0)
    throw ContractError("relative equilibria need Omega2 == 0");

  detail::FixedSystem fs(sys, det, drive, relative);
  const int n = fs.size();
  double z[7] = {};
  ModeState g0 = guess;
  if (relative && !std::isfinite(opt.nuGuess)) {
    // Fresh solve: choose the gauge with b real and positive.
    const double mag = std::abs(g0.b);
    if (mag > 0.0) {
      const Complex ph = g0.b / mag;
      g0.b = mag;
      g0.a2 *= ph;
    }
  }
  to_real(g0, z);
  if (relative) {
    if (std::isfinite(opt.nuGuess)) {
      z[6] = opt.nuGuess;
    } else {
      // Least-squares rotation rate for the guess.
      double F[7];
      z[6] = 0.0;
      fs.eval(z, F);
      const double G[6] = {0, 0, -z[3], z[2], z[5], -z[4]};
      double num = 0.0, den = 0.0;
      for (int i = 0; i < 6; ++i) {
        num += F[i] * G[i];
        den += G[i] * G[i];
      }
      z[6] = den > 0.0 ? -num / den : 0.0;
    }
  }

  double F[7];
  fs.eval(z, F);
  double fnorm = fs.norm_of(F);
  for (int it = 0;; ++it) {
    const double rel = fnorm / residual_scale(from_real(z), sys, det);
    if (!std::isfinite(rel)) return unresolved(z, relative, it, rel);
    if (rel <= opt.tol) {
      // One extra full step, kept only if it helps.
      double trial[7], Ft[7];
      const linalg::Lu lu(fs.jac(z));
      if (!lu.singular()) {
        std::vector<double> rhs(F, F + n);
        for (auto& v : rhs) v = -v;
        const auto dz = lu.solve(rhs);
        for (int i = 0; i < n; ++i) trial[i] = z[i] + dz[i];
        fs.eval(trial, Ft);
        if (all_finite(Ft, n) && fs.norm_of(Ft) < fnorm) {
          std::copy(trial, trial + n, z);
          fnorm = fs.norm_of(Ft);
        }
      }
      FixedPoint fp;
      fp.state = from_real(z);
      fp.converged = true;
      fp.iterations = it;
      fp.relative = relative;
      fp.rotation = relative ? z[6] : 0.0;
      fp.residualNorm = fnorm / residual_scale(fp.state, sys, det);
      fp.branch = classify_branch(fp.state, relative, sys, det);
      return fp;
    }
    if (it >= opt.maxIter) return unresolved(z, relative, it, rel);

    const linalg::Lu lu(fs.jac(z));
    if (lu.singular()) return unresolved(z, relative, it, rel);
    std::vector<double> rhs(F, F + n);
    for (auto& v : rhs) v = -v;
    const auto dz = lu.solve(rhs);

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.maxHalvings; ++h, lambda *= 0.5) {
      double trial[7], Ft[7];
      for (int i = 0; i < n; ++i) trial[i] = z[i] + lambda * dz[i];
      fs.eval(trial, Ft);
      if (!all_finite(Ft, n)) continue;
      const double tn = fs.norm_of(Ft);
      if (tn < fnorm) {
        std::copy(trial, trial + n, z);
        std::copy(Ft, Ft + n, F);
        fnorm = tn;
        accepted = true;
        break;
      }
    }
    if (!accepted) return unresolved(z, relative, it + 1, rel);
  }
}

FixedPoint analytic_low_branch(const SystemParams& sys, const Detunings& det,
                               const DriveParams& drive) {
  if (drive.Omega2 != 0.0)
    throw ContractError("analytic_low_branch requires Omega2 == 0");
  FixedPoint fp;
  fp.state.a1 = Complex(0.0, -drive.Omega1) / Complex(sys.gamma1, det.dOmega1);
  const Residual r = residual(fp.state, sys, det, drive);
  double s = 0.0;
  for (double v : r) s += v * v;
  fp.residualNorm = std::sqrt(s) / residual_scale(fp.state, sys, det);
  fp.converged = true;
  fp.branch = Branch::low;
  return fp;
}

void write_branch_csv(std::ostream& os, const BranchCurve& curve) {
  os << "Omega1,Omega2,re_a1,im_a1,re_a2,im_a2,re_b,im_b,I1,I2,Ib,branch,"
        "residual,rotation\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const auto& p : curve.points) {
    const ModeState& s = p.fp.state;
    const double cols[] = {p.Omega1,     curve.Omega2,  s.a1.real(),
                           s.a1.imag(),  s.a2.real(),   s.a2.imag(),
                           s.b.real(),   s.b.imag(),    s.i1(),
                           s.i2(),       s.ib()};
    for (double v : cols) {
      put(v);
      os << ',';
    }
    os << branch_name(p.fp.branch) << ',';
    put(p.fp.residualNorm);
    os << ',';
    put(p.fp.rotation);
    os << '\n';
  }
}

}  // namespace hardexc
