#include "hardexc/output.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

namespace hardexc {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw OutputError("cannot write " + tmp);
    os << text;
    os.flush();
    if (!os) throw OutputError("short write to " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw OutputError("cannot rename " + tmp + ": " + ec.message());
}

void OutputSet::commit() const {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw OutputError("cannot create " + dir_ + ": " + ec.message());
  for (const auto& [name, os] : files_)
    write_file_atomic((fs::path(dir_) / name).string(), os.str());
}

json provenance(const RunConfig& cfg, const std::string& command) {
  json c = to_json(cfg);
  // Execution settings do not change results; they live in metadata.json.
  c["sweep"].erase("workers");
  c["sweep"].erase("isa");
  return {{"engine", kEngineName},
          {"version", kEngineVersion},
          {"command", command},
          {"config", c}};
}

json thresholds_json(const ThresholdSet& t, const SystemParams& sys,
                     const Detunings& det) {
  const Interval bi = bistable_region(sys, det);
  json j = {{"OmegaEx", t.OmegaEx},
            {"OmegaTh", t.OmegaTh},
            {"ratio", t.OmegaTh > 0.0 ? t.OmegaEx / t.OmegaTh : 0.0},
            {"hardMode", t.hardMode}};
  j["bistable"] = bi.empty ? json(nullptr)
                           : json{{"lo", bi.lo}, {"hi", bi.hi}};
  return j;
}

json sweep_json(const SweepResult& r, const RunConfig& cfg,
                const std::string& command) {
  json rows = json::array();
  const std::size_t n = r.omega1.size();
  for (std::size_t row = 0; row < r.omega2.size(); ++row) {
    json I1 = json::array(), I2 = json::array(), Ib = json::array();
    json settled = json::array(), reason = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      const SweepPoint& p = r.at(row, i);
      I1.push_back(p.intensity[0]);
      I2.push_back(p.intensity[1]);
      Ib.push_back(p.intensity[2]);
      settled.push_back(p.settled);
      reason.push_back(std::string(termination_name(p.reason)));
    }
    json jumps = json::array();
    for (std::size_t k : r.jumps[row]) jumps.push_back(r.omega1[k + 1]);
    rows.push_back({{"Omega2", r.omega2[row]},
                    {"jumps", jumps},
                    {"I1", I1},
                    {"I2", I2},
                    {"Ib", Ib},
                    {"settled", settled},
                    {"reason", reason}});
  }
  return {{"metadata", provenance(cfg, command)},
          {"fingerprint", sweep_fingerprint(cfg.sweep, cfg.sys, cfg.det)},
          {"complete", r.complete},
          {"Omega1", r.omega1},
          {"rows", rows}};
}

json run_metadata(const RunConfig& cfg, const std::string& command,
                  double wallSeconds) {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {{"engine", kEngineName},
          {"version", kEngineVersion},
          {"command", command},
          {"timestamp", stamp},
          {"wallSeconds", wallSeconds},
          {"workers", cfg.sweep.workers},
          {"isa", std::string(kernels::isa_name(cfg.sweep.isa))}};
}

std::string error_report(const std::string& kind, const std::string& message,
                         int exitCode) {
  return json{{"error", kind}, {"message", message}, {"exitCode", exitCode}}
      .dump();
}

}  // namespace hardexc
