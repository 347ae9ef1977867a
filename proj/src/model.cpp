#include "hardexc/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "detail/dp5.hpp"

namespace hardexc {

double SystemParams::min_rate() const {
  return std::min({gamma1, gamma2, gammaB});
}

void SystemParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!std::isfinite(v) || !(v > 0.0))
      throw ParameterError(std::string(name) + " must be finite and > 0");
  };
  positive(gamma1, "gamma1");
  positive(gamma2, "gamma2");
  positive(gammaB, "gammaB");
  if (!std::isfinite(g) || g == 0.0)
    throw ParameterError("g must be finite and nonzero");
  for (double w : {omega1, omega2, omegaB})
    if (!std::isfinite(w)) throw ParameterError("mode frequency not finite");
}

void SystemParams::validate_integrable() const {
  for (double r : {gamma1, gamma2, gammaB})
    if (!std::isfinite(r) || r < 0.0)
      throw ParameterError("decay rates must be finite and >= 0");
  if (!std::isfinite(g)) throw ParameterError("g must be finite");
  for (double w : {omega1, omega2, omegaB})
    if (!std::isfinite(w)) throw ParameterError("mode frequency not finite");
}

std::vector<std::string> SystemParams::validate_lab() const {
  validate_integrable();
  if (!(omega1 > 0.0 && omega2 > 0.0 && omegaB > 0.0))
    throw ParameterError("lab frame needs positive omega1, omega2, omegaB");
  const double mismatch = std::abs((omega1 - omega2) - omegaB);
  if (mismatch > 1e-9 * std::max(std::abs(omegaB), std::abs(omega1)))
    throw ParameterError("lab frame requires omega1 - omega2 == omegaB");
  std::vector<std::string> warnings;
  if (std::abs(g) > 1e-3 * std::min(omega1, omega2)) {
    std::ostringstream os;
    os << "|g| = " << std::abs(g)
       << " is not small against the optical frequencies (min "
       << std::min(omega1, omega2) << "); rotating-wave terms may matter";
    warnings.push_back(os.str());
  }
  return warnings;
}

void DriveParams::validate() const {
  if (!std::isfinite(Omega1) || Omega1 < 0.0)
    throw ParameterError("Omega1 must be finite and >= 0");
  if (!std::isfinite(Omega2) || Omega2 < 0.0)
    throw ParameterError("Omega2 must be finite and >= 0");
  if (!std::isfinite(omegaPump))
    throw ParameterError("pump frequency not finite");
}

Detunings Detunings::from(const SystemParams& sys, const DriveParams& drive) {
  Detunings d;
  d.dOmega1 = sys.omega1 - drive.omegaPump;
  d.dOmega2 = sys.omega2 - drive.omegaPump;
  d.Delta2 = 0.0;
  d.dOmegaB = sys.omegaB + d.dOmega2;
  return d;
}

Detunings Detunings::direct(double dOmega1, double dOmegaB, double omegaB,
                            double Delta2) {
  Detunings d;
  d.dOmega1 = dOmega1;
  d.dOmegaB = dOmegaB;
  d.dOmega2 = dOmegaB - omegaB;
  d.Delta2 = Delta2;
  return d;
}

bool ModeState::finite() const {
  return std::isfinite(a1.real()) && std::isfinite(a1.imag()) &&
         std::isfinite(a2.real()) && std::isfinite(a2.imag()) &&
         std::isfinite(b.real()) && std::isfinite(b.imag());
}

double ModeState::norm() const { return std::sqrt(i1() + i2() + ib()); }

ModeState operator+(const ModeState& x, const ModeState& y) {
  return {x.a1 + y.a1, x.a2 + y.a2, x.b + y.b};
}
ModeState operator-(const ModeState& x, const ModeState& y) {
  return {x.a1 - y.a1, x.a2 - y.a2, x.b - y.b};
}
ModeState operator*(double s, const ModeState& x) {
  return {s * x.a1, s * x.a2, s * x.b};
}

void to_real(const ModeState& s, double out[6]) {
  out[0] = s.a1.real();
  out[1] = s.a1.imag();
  out[2] = s.a2.real();
  out[3] = s.a2.imag();
  out[4] = s.b.real();
  out[5] = s.b.imag();
}

ModeState from_real(const double in[6]) {
  return {{in[0], in[1]}, {in[2], in[3]}, {in[4], in[5]}};
}

namespace {

void require_finite(const ModeState& s) {
  if (!s.finite()) throw NumericError("numeric overflow: non-finite state");
}

constexpr Complex kI{0.0, 1.0};

}  // namespace

ModeState rhs_lab(const ModeState& s, double t, const SystemParams& sys,
                  const DriveParams& drive) {
  require_finite(s);
  const Complex pump = std::polar(1.0, -drive.omegaPump * t);
  const Complex seed = std::polar(1.0, -sys.omega2 * t);
  ModeState d;
  d.a1 = Complex(-sys.gamma1, -sys.omega1) * s.a1 - kI * sys.g * s.a2 * s.b -
         kI * drive.Omega1 * pump;
  d.a2 = Complex(-sys.gamma2, -sys.omega2) * s.a2 -
         kI * sys.g * s.a1 * std::conj(s.b) - kI * drive.Omega2 * seed;
  d.b = Complex(-sys.gammaB, -sys.omegaB) * s.b -
        kI * sys.g * s.a1 * std::conj(s.a2);
  return d;
}

ModeState rhs_rotating(const ModeState& s, const SystemParams& sys,
                       const Detunings& det, const DriveParams& drive) {
  require_finite(s);
  const auto c = detail::make_coeffs<double>(
      sys.gamma1, sys.gamma2, sys.gammaB, det.dOmega1, det.Delta2,
      det.dOmegaB, sys.g, drive.Omega1, drive.Omega2);
  double y[6], f[6];
  to_real(s, y);
  detail::rotating_rhs(c, y, f);
  return from_real(f);
}

ModeState to_rotating(const ModeState& lab, double t, const DriveParams& drive,
                      const SystemParams& sys) {
  const double w = drive.omegaPump;
  return {lab.a1 * std::polar(1.0, w * t),
          lab.a2 * std::polar(1.0, sys.omega2 * t),
          lab.b * std::polar(1.0, (w - sys.omega2) * t)};
}

ModeState from_rotating(const ModeState& rot, double t,
                        const DriveParams& drive, const SystemParams& sys) {
  const double w = drive.omegaPump;
  return {rot.a1 * std::polar(1.0, -w * t),
          rot.a2 * std::polar(1.0, -sys.omega2 * t),
          rot.b * std::polar(1.0, -(w - sys.omega2) * t)};
}

Charges energy_and_charges(const ModeState& s, const SystemParams& sys) {
  Charges c;
  c.energy = sys.omega1 * s.i1() + sys.omega2 * s.i2() + sys.omegaB * s.ib() +
             2.0 * sys.g * (std::conj(s.a1) * s.a2 * s.b).real();
  c.n12 = s.i1() + s.i2();
  c.n2b = s.i2() - s.ib();
  return c;
}

}  // namespace hardexc
