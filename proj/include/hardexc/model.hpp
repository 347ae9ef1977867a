#pragma once

// Physical parameters and right-hand sides of the driven three-mode
// optomechanical system: two optical modes a1, a2 coupled through a phonon
// mode b.  All frequencies and rates are angular (rad/s).

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardexc {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Thrown when a state or parameter set leaves the finite domain.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a parameter set violates a physical invariant.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SystemParams {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gammaB = 0.0;
  // Mode frequencies; only the lab frame needs them.
  double omega1 = 0.0;
  double omega2 = 0.0;
  double omegaB = 0.0;
  double g = 0.0;

  double min_rate() const;
  /// Rejects non-positive rates or a zero coupling.
  void validate() const;
  /// Weaker check used by the integrator: finite values and rates >= 0, so
  /// undamped or uncoupled test systems can be integrated.
  void validate_integrable() const;
  /// validate_integrable() plus omega1 - omega2 == omegaB (relative 1e-9).
  /// Returns soft warnings (weak-coupling condition) instead of throwing.
  std::vector<std::string> validate_lab() const;
};

/// Pump carrier and drive amplitudes.  The seed is resonant with mode 2.
struct DriveParams {
  double omegaPump = 0.0;
  double Omega1 = 0.0;
  double Omega2 = 0.0;

  void validate() const;
};

struct Detunings {
  double dOmega1 = 0.0;
  double dOmega2 = 0.0;
  double Delta2 = 0.0;
  double dOmegaB = 0.0;

  /// dOmega_{1,2} = omega_{1,2} - omegaPump, Delta2 = 0,
  /// dOmegaB = omegaB + dOmega2.
  static Detunings from(const SystemParams& sys, const DriveParams& drive);
  /// Rotating-frame-only construction; dOmega2 is recovered as
  /// dOmegaB - omegaB.
  static Detunings direct(double dOmega1, double dOmegaB, double omegaB = 0.0,
                          double Delta2 = 0.0);
};

struct ModeState {
  Complex a1{};
  Complex a2{};
  Complex b{};

  double i1() const { return std::norm(a1); }
  double i2() const { return std::norm(a2); }
  double ib() const { return std::norm(b); }
  bool finite() const;
  double norm() const;  // Euclidean norm over all six real coordinates

  friend bool operator==(const ModeState&, const ModeState&) = default;
};

ModeState operator+(const ModeState& x, const ModeState& y);
ModeState operator-(const ModeState& x, const ModeState& y);
ModeState operator*(double s, const ModeState& x);

/// Real coordinates (Re a1, Im a1, Re a2, Im a2, Re b, Im b).
void to_real(const ModeState& s, double out[6]);
ModeState from_real(const double in[6]);

/// Lab-frame derivative including the carrier phases of both drives.
ModeState rhs_lab(const ModeState& state, double t, const SystemParams& sys,
                  const DriveParams& drive);

/// Autonomous derivative in the frame co-rotating with the drives.
ModeState rhs_rotating(const ModeState& state, const SystemParams& sys,
                       const Detunings& det, const DriveParams& drive);

/// Lab -> rotating: a1 e^{i w t}, a2 e^{i w2 t}, b e^{i (w - w2) t}.
ModeState to_rotating(const ModeState& lab, double t, const DriveParams& drive,
                      const SystemParams& sys);
ModeState from_rotating(const ModeState& rot, double t,
                        const DriveParams& drive, const SystemParams& sys);

struct Charges {
  double energy = 0.0;  // omega-weighted quanta plus coupling energy
  double n12 = 0.0;     // |a1|^2 + |a2|^2
  double n2b = 0.0;     // |a2|^2 - |b|^2
};

/// Classical image of the undriven Hamiltonian and its two number charges.
Charges energy_and_charges(const ModeState& state, const SystemParams& sys);

}  // namespace hardexc
