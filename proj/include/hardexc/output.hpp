#pragma once

// Result files.  Data files are deterministic; wall-clock facts go to a
// separate metadata.json.  Everything for one command is staged in memory
// and written at the end, so a failed command leaves no partial files.

#include <json.hpp>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hardexc/config.hpp"
#include "hardexc/stability.hpp"
#include "hardexc/sweep.hpp"

namespace hardexc {

inline constexpr const char* kEngineName = "hardexc";
inline constexpr const char* kEngineVersion = "1.0.0";

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes through a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& text);

class OutputSet {
 public:
  explicit OutputSet(std::string dir) : dir_(std::move(dir)) {}

  std::ostream& file(const std::string& name) { return files_[name]; }
  void json_file(const std::string& name, const nlohmann::json& j) {
    files_[name] << j.dump(2) << '\n';
  }
  /// Creates the directory and writes every staged file.
  void commit() const;

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::map<std::string, std::ostringstream> files_;
};

/// Engine identity plus the fully resolved configuration, minus the
/// execution settings (workers, ISA) that cannot change results.
nlohmann::json provenance(const RunConfig& cfg, const std::string& command);

nlohmann::json thresholds_json(const ThresholdSet& t, const SystemParams& sys,
                               const Detunings& det);

/// Nested rows: for each Omega2 the Omega1 grid, intensities, settle flags
/// and detected jumps, plus provenance.
nlohmann::json sweep_json(const SweepResult& r, const RunConfig& cfg,
                          const std::string& command);

/// Timestamp, wall time and execution settings.
nlohmann::json run_metadata(const RunConfig& cfg, const std::string& command,
                            double wallSeconds);

/// One-line JSON error report for stderr.
std::string error_report(const std::string& kind, const std::string& message,
                         int exitCode);

}  // namespace hardexc
