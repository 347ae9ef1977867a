#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hardexc/config.hpp"
#include "hardexc/output.hpp"
#include "support.hpp"

using namespace hardexc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json minimal() {
  return json::parse(R"({
    "system": {"gamma1_hz": 19e6, "gamma2_hz": 19e6, "gammaB_hz": 121e6,
               "omega1_hz": 200e12, "omega2_hz": 190e12, "omegaB_hz": 10e12,
               "g_hz": 1.6e3},
    "detuning": {"dOmega1_hz": -6e9, "dOmegaB_hz": -6e9},
    "drive": {"Omega1": {"relative_to_th": 0.5}}
  })");
}

bool throws_config(const json& j) {
  try {
    load_config(j);
  } catch (const ConfigError&) {
    return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("presets load and resolve the stated parameters") {
  const auto names = preset_names();
  REQUIRE(names.size() >= 2);
  for (const auto& n : names) CHECK_NOTHROW(load_config(preset_json(n)));
  CHECK_THROWS_AS(preset_json("nonexistent"), ConfigError);

  const RunConfig cfg = load_config(preset_json("fig2"));
  const SystemParams ref = testing::fig2_system();
  CHECK(cfg.sys.gamma1 == doctest::Approx(ref.gamma1).epsilon(1e-15));
  CHECK(cfg.sys.gammaB == doctest::Approx(ref.gammaB).epsilon(1e-15));
  CHECK(cfg.sys.g == doctest::Approx(ref.g).epsilon(1e-15));
  CHECK(cfg.det.dOmega1 == doctest::Approx(kTwoPi * -6e9).epsilon(1e-15));
  const double th = thresholds(cfg.sys, cfg.det).OmegaTh;
  CHECK(cfg.drive.Omega1 == doctest::Approx(0.5 * th).epsilon(1e-15));
  CHECK(cfg.sweep.omega1.max == doctest::Approx(1.2 * th).epsilon(1e-15));
  CHECK(cfg.sweep.omega1.count == 200);

  const RunConfig soft = load_config(preset_json("soft"));
  CHECK(soft.det.dOmega1 == 0.0);
  CHECK(soft.det.dOmegaB == 0.0);
}

TEST_CASE("Hz and rad/s forms are equivalent") {
  json a = minimal();
  json b = minimal();
  b["system"].erase("g_hz");
  b["system"]["g"] = kTwoPi * 1.6e3;
  const RunConfig ca = load_config(a), cb = load_config(b);
  CHECK(ca.sys.g == doctest::Approx(cb.sys.g).epsilon(1e-15));
  CHECK(ca.det.Delta2 == 0.0);
}

TEST_CASE("invalid documents are rejected") {
  json j = minimal();
  j["system"]["bogus"] = 1;
  CHECK(throws_config(j));

  j = minimal();
  j["surplus"] = {};
  CHECK(throws_config(j));

  j = minimal();
  j["system"]["g"] = 1.0;  // alongside g_hz
  CHECK(throws_config(j));

  j = minimal();
  j["system"]["gamma2_hz"] = -1.0;
  CHECK(throws_config(j));

  j = minimal();
  j["system"]["g_hz"] = 0.0;
  CHECK(throws_config(j));

  j = minimal();
  j["system"]["gamma1_hz"] = "fast";
  CHECK(throws_config(j));

  j = minimal();
  j["sweep"] = {{"protocol", "sideways"}};
  CHECK(throws_config(j));

  j = minimal();
  j["sweep"] = {{"omega2", {{"min", 0}, {"max", 1}, {"count", 3}}},
                {"omega2_values", {0}}};
  CHECK(throws_config(j));

  j = minimal();
  j["drive"]["Omega2"] = -1.0;
  CHECK(throws_config(j));

  j = minimal();
  j.erase("detuning");
  CHECK(throws_config(j));

  j = minimal();
  j["simulate"] = {{"frame", "sideways"}};
  CHECK(throws_config(j));

  CHECK(throws_config(json::array()));
}

TEST_CASE("error messages name the offending key") {
  json j = minimal();
  j["integrator"] = {{"relTol", -1.0}};
  try {
    load_config(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("integrator") != std::string::npos);
  }
}

TEST_CASE("pump frequency fixes the detunings") {
  json j = minimal();
  j.erase("detuning");
  j["drive"]["pump_hz"] = 200e12 - 6e9;
  const RunConfig cfg = load_config(j);
  CHECK(cfg.det.dOmega1 == doctest::Approx(kTwoPi * 6e9).epsilon(1e-9));
  j["detuning"] = minimal()["detuning"];
  CHECK(throws_config(j));
}

TEST_CASE("resolved configuration round-trips") {
  for (const auto& n : preset_names()) {
    json j = preset_json(n);
    j["simulate"] = {{"tEnd", 1e-6},
                     {"frame", "lab"},
                     {"init", {{"a1", {1.0, -2.0}}, {"a2", {0, 0}}, {"b", {0.5, 0}}}}};
    j["sweep"]["omega2"] = {{"min", 0}, {"max", {{"relative_to_th", 0.1}}}, {"count", 5}};
    j["sweep"].erase("omega2_values");
    j["sweep"]["checkpoint"] = "ck";
    j["figures"] = {{"rowsRel", {0.0, 0.05}}, {"stabilityPoints", 9}};
    j["output"] = "somewhere";
    const RunConfig cfg = load_config(j);
    const json out = to_json(cfg);
    const RunConfig again = load_config(out);
    CHECK(same_config(cfg, again));
    CHECK(to_json(again) == out);
    CHECK(again.simulate.init.a1 == std::complex<double>(1.0, -2.0));
    CHECK(again.sweep.omega2->count == 5);
  }
  RunConfig x = load_config(preset_json("fig2"));
  RunConfig y = x;
  y.sys.g *= 1.0 + 1e-15;
  CHECK_FALSE(same_config(x, y));
}

TEST_CASE("figure plans") {
  const RunConfig cfg = load_config(preset_json("fig2"));
  const double th = thresholds(cfg.sys, cfg.det).OmegaTh;
  const SweepPlan rows = rows_plan(cfg);
  CHECK(rows.protocol == Protocol::coldStart);
  REQUIRE(rows.omega2Values.size() == 3);
  CHECK(rows.omega2Values[2] == doctest::Approx(0.07 * th));
  CHECK(rows.omega1.count == 200);
  CHECK(rows.omega1.max == doctest::Approx(1.2 * th));
  const SweepPlan map = map_plan(cfg);
  REQUIRE(map.omega2);
  CHECK(map.omega2->count == 11);
  CHECK(map.omega2->max == doctest::Approx(0.1 * th));
  const auto p1 = omega1_path(cfg);
  REQUIRE(p1.size() == cfg.figures.stabilityPoints);
  for (const auto& d : p1) CHECK(d.Omega2 == doctest::Approx(0.07 * th));
  const auto p2 = omega2_path(cfg);
  REQUIRE(p2.size() == cfg.figures.stabilityPoints);
  CHECK(p2.front().Omega2 == 0.0);
  CHECK(p2.back().Omega2 == doctest::Approx(0.1 * th));
  for (const auto& d : p2) CHECK(d.Omega1 == doctest::Approx(0.7 * th));
}

TEST_CASE("output staging and provenance") {
  const fs::path dir = fs::temp_directory_path() /
                       ("hardexc-out-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  {
    OutputSet out((dir / "nested").string());
    out.file("a.csv") << "x\n1\n";
    out.json_file("b.json", {{"k", 1}});
    CHECK_FALSE(fs::exists(dir));
    out.commit();
  }
  std::ifstream is(dir / "nested" / "b.json");
  json b;
  is >> b;
  CHECK(b["k"] == 1);
  CHECK(fs::file_size(dir / "nested" / "a.csv") == 4);
  for (const auto& e : fs::directory_iterator(dir / "nested"))
    CHECK(e.path().extension() != ".tmp");
  fs::remove_all(dir);

  RunConfig cfg = load_config(preset_json("fig2"));
  cfg.sweep.workers = 3;
  const json p = provenance(cfg, "sweep");
  CHECK(p["engine"] == kEngineName);
  CHECK(p["version"] == kEngineVersion);
  CHECK_FALSE(p["config"]["sweep"].contains("workers"));
  CHECK_FALSE(p["config"]["sweep"].contains("isa"));
  CHECK(run_metadata(cfg, "sweep", 1.5)["workers"] == 3);

  const json err = json::parse(error_report("config", "bad \"key\"", 2));
  CHECK(err["exitCode"] == 2);
  CHECK(err["message"] == "bad \"key\"");

  const json t = thresholds_json(thresholds(cfg.sys, cfg.det), cfg.sys, cfg.det);
  CHECK(t["hardMode"] == true);
  CHECK(t["ratio"].get<double>() == doctest::Approx(2.649265622e-2).epsilon(1e-8));
}

TEST_CASE("sweep JSON layout") {
  SweepResult r;
  r.omega1 = {0.0, 1.0, 2.0};
  r.omega2 = {0.0, 0.5};
  r.points.resize(6);
  for (std::size_t i = 0; i < 6; ++i) r.points[i].intensity = {1.0 * i, 0.0, 2.0 * i};
  r.jumps = {{1}, {}};
  r.complete = true;
  const RunConfig cfg = load_config(preset_json("fig2"));
  const json j = sweep_json(r, cfg, "sweep");
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][0]["jumps"] == json::array({2.0}));
  CHECK(j["rows"][1]["Ib"] == json::array({6.0, 8.0, 10.0}));
  CHECK(j["Omega1"].size() == 3);
  CHECK(j["complete"] == true);
  CHECK(j["fingerprint"].is_string());
}

}
