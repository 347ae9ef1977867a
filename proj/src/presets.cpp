#include <string_view>

#include "hardexc/config.hpp"

namespace hardexc {

namespace {

struct Preset {
  std::string_view name;
  std::string_view text;
};

// Hard excitation: detunings satisfy dOmega1 * dOmegaB > gamma1 (gamma2 + gammaB).
constexpr std::string_view kFig2 = R"({
  "system": {
    "gamma1_hz": 19e6,
    "gamma2_hz": 19e6,
    "gammaB_hz": 121e6,
    "g_hz": 1.6e3
  },
  "detuning": {
    "dOmega1_hz": -6e9,
    "dOmegaB_hz": -6e9,
    "Delta2_hz": 0
  },
  "drive": {
    "Omega1": {"relative_to_th": 0.5},
    "Omega2": 0
  },
  "sweep": {
    "omega1": {"min": 0, "max": {"relative_to_th": 1.2}, "count": 200},
    "omega2_values": [0],
    "protocol": "coldStart"
  }
})";

// Resonant pump and phonon: the hard-excitation inequality fails.
constexpr std::string_view kSoft = R"({
  "system": {
    "gamma1_hz": 19e6,
    "gamma2_hz": 19e6,
    "gammaB_hz": 121e6,
    "g_hz": 1.6e3
  },
  "detuning": {
    "dOmega1_hz": 0,
    "dOmegaB_hz": 0,
    "Delta2_hz": 0
  },
  "drive": {
    "Omega1": {"relative_to_th": 0.5},
    "Omega2": 0
  },
  "sweep": {
    "omega1": {"min": 0, "max": {"relative_to_th": 1.2}, "count": 200},
    "omega2_values": [0],
    "protocol": "coldStart"
  }
})";

constexpr Preset kPresets[] = {{"fig2", kFig2}, {"soft", kSoft}};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

nlohmann::json preset_json(const std::string& name) {
  for (const auto& p : kPresets)
    if (p.name == name) return nlohmann::json::parse(p.text);
  std::string known;
  for (const auto& p : kPresets) known += (known.empty() ? "" : ", ") + std::string(p.name);
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

}  // namespace hardexc
