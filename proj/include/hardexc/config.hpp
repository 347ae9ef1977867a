#pragma once

// JSON run configuration.  Frequencies are given either in rad/s (plain
// key, e.g. "gamma1") or as value/2pi in Hz ("gamma1_hz"); amplitudes are
// s^-1 or {"relative_to_th": x}, resolved against the threshold formula.
// Unknown keys are rejected.

#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardexc/integrate.hpp"
#include "hardexc/model.hpp"
#include "hardexc/sweep.hpp"

namespace hardexc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulateSettings {
  double tEnd = 0.0;  // s; 0: 100 / min(gamma)
  Frame frame = Frame::rotating;
  ModeState init;
  /// Floor on |a2| and |b| at t = 0; without it a2 = b = 0 never grows.
  double fluctuation = 1.0;
};

struct FigureSettings {
  std::size_t omega1Points = 200;
  double omega1MaxRel = 1.2;  // in units of OmegaTh
  std::size_t omega2Rows = 11;
  double omega2MaxRel = 0.1;
  std::vector<double> rowsRel = {0.0, 0.03, 0.07};
  std::size_t stabilityPoints = 61;
  double fig5Omega2Rel = 0.07;
  double fig5Omega1Rel = 0.7;
};

struct RunConfig {
  SystemParams sys;
  Detunings det;
  DriveParams drive;
  IntegratorConfig integrator;
  SimulateSettings simulate;
  SweepPlan sweep;
  FigureSettings figures;
  std::string outDir;
};

/// Parses and validates; throws ConfigError with the offending key.
RunConfig load_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

/// Fully resolved configuration in rad/s and s^-1.  Feeding it back to
/// load_config reproduces the same RunConfig.
nlohmann::json to_json(const RunConfig& cfg);

bool same_config(const RunConfig& a, const RunConfig& b);

/// Figure grids derived from cfg.figures; integrator, workers, ISA and
/// checkpoint settings come from cfg.sweep.
SweepPlan rows_plan(const RunConfig& cfg);  // one row per figures.rowsRel
SweepPlan map_plan(const RunConfig& cfg);   // Omega2 axis with omega2Rows
/// Drives for the low-branch spectra: the Omega1 grid at fixed
/// fig5Omega2Rel, and the Omega2 grid at fixed fig5Omega1Rel.
std::vector<DriveParams> omega1_path(const RunConfig& cfg);
std::vector<DriveParams> omega2_path(const RunConfig& cfg);

/// Bundled configurations: "fig2" (hard excitation) and "soft".
std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
nlohmann::json preset_json(const std::string& name);

}  // namespace hardexc
