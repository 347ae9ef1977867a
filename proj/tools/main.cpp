// hardexc: command-line driver.  Exit codes: 0 ok, 1 output failure,
// 2 bad configuration or arguments, 3 numerical failure, 4 partial sweep.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "hardexc/config.hpp"
#include "hardexc/integrate.hpp"
#include "hardexc/output.hpp"
#include "hardexc/stability.hpp"
#include "hardexc/steady.hpp"
#include "hardexc/sweep.hpp"

using namespace hardexc;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kIo = 1, kConfig = 2, kNumeric = 3, kPartial = 4 };

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PartialSweep : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string preset;
  std::string out;
  std::optional<std::size_t> workers;
  std::string isa;
  std::optional<double> omega1Rel;
  std::optional<double> omega2Rel;
  std::optional<double> tEnd;
  std::string protocol;
  std::size_t stopAfter = 0;
  bool branches = false;
};

RunConfig resolve(const Options& o, const std::string& defaultPreset) {
  json j;
  if (!o.config.empty()) {
    std::ifstream is(o.config);
    if (!is) throw ConfigError("cannot open config file " + o.config);
    try {
      is >> j;
    } catch (const json::exception& e) {
      throw ConfigError(o.config + ": invalid JSON: " + e.what());
    }
    if (!o.preset.empty()) {
      json base = preset_json(o.preset);
      base.merge_patch(j);
      j = base;
    }
  } else {
    j = preset_json(o.preset.empty() ? defaultPreset : o.preset);
  }
  if (!j.is_object()) throw ConfigError("config: expected an object");
  if (o.omega1Rel) j["drive"]["Omega1"] = {{"relative_to_th", *o.omega1Rel}};
  if (o.omega2Rel) j["drive"]["Omega2"] = {{"relative_to_th", *o.omega2Rel}};
  if (o.tEnd) j["simulate"]["tEnd"] = *o.tEnd;
  if (!o.protocol.empty()) j["sweep"]["protocol"] = o.protocol;
  if (o.workers) j["sweep"]["workers"] = *o.workers;
  if (!o.isa.empty()) j["sweep"]["isa"] = o.isa;
  RunConfig cfg = load_config(j);
  cfg.sweep.stopAfter = o.stopAfter;
  return cfg;
}

std::string out_dir(const Options& o, const RunConfig& cfg) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("HARDEXC_OUT_DIR"); env && *env) return env;
  if (!cfg.outDir.empty()) return cfg.outDir;
  return "hardexc-out";
}

json state_json(const ModeState& s) {
  auto c = [](Complex z) { return json::array({z.real(), z.imag()}); };
  return {{"a1", c(s.a1)}, {"a2", c(s.a2)}, {"b", c(s.b)},
          {"I1", s.i1()},  {"I2", s.i2()},  {"Ib", s.ib()}};
}

json fixed_point_json(const FixedPoint& fp) {
  json j = {{"branch", std::string(branch_name(fp.branch))},
            {"converged", fp.converged},
            {"iterations", fp.iterations},
            {"residualNorm", fp.residualNorm},
            {"relative", fp.relative},
            {"state", state_json(fp.state)}};
  if (fp.relative) j["rotation"] = fp.rotation;
  return j;
}

json report_json(const StabilityReport& r) {
  json ev = json::array();
  for (Complex z : r.eigenvalues) ev.push_back(json::array({z.real(), z.imag()}));
  return {{"eigenvalues", ev},
          {"spectralAbscissa", r.spectralAbscissa},
          {"classification", std::string(stability_name(r.classification))},
          {"gaugeIndex", r.gaugeIndex},
          {"maxEigenResidual", r.maxEigenResidual}};
}

// ---- commands -------------------------------------------------------------

void cmd_thresholds(const RunConfig& cfg, OutputSet& out) {
  const ThresholdSet t = thresholds(cfg.sys, cfg.det);
  std::printf("OmegaEx  %.9e s^-1\nOmegaTh  %.9e s^-1\nratio    %.9e\nmode     %s\n",
              t.OmegaEx, t.OmegaTh, t.OmegaEx / t.OmegaTh,
              t.hardMode ? "hard" : "soft");
  json j = thresholds_json(t, cfg.sys, cfg.det);
  j["metadata"] = provenance(cfg, "thresholds");
  out.json_file("thresholds.json", j);
}

void cmd_simulate(const RunConfig& cfg, OutputSet& out) {
  FrameRhs rhs;
  if (cfg.simulate.frame == Frame::lab) {
    try {
      for (const auto& w : cfg.sys.validate_lab())
        std::cerr << "warning: " << w << '\n';
    } catch (const std::exception& e) {
      throw ConfigError(std::string("system: ") + e.what());
    }
    rhs = FrameRhs::lab(cfg.sys, cfg.drive);
  } else {
    rhs = FrameRhs::rotating(cfg.sys, cfg.det, cfg.drive);
  }
  const double tEnd =
      cfg.simulate.tEnd > 0.0 ? cfg.simulate.tEnd : 100.0 / cfg.sys.min_rate();
  const Trajectory tr = integrate(
      rhs, with_floor(cfg.simulate.init, cfg.simulate.fluctuation), tEnd,
      cfg.integrator);
  if (tr.reason == Termination::overflow ||
      tr.reason == Termination::stepUnderflow ||
      tr.reason == Termination::maxSteps)
    throw NumericError("integration stopped: " +
                       std::string(termination_name(tr.reason)) + " at t = " +
                       std::to_string(tr.times.empty() ? 0.0 : tr.times.back()));
  write_trajectory_csv(out.file("trajectory.csv"), tr);
  json j = {{"metadata", provenance(cfg, "simulate")},
            {"tEnd", tEnd},
            {"reason", std::string(termination_name(tr.reason))},
            {"accepted", tr.accepted},
            {"rejected", tr.rejected},
            {"samples", tr.times.size()},
            {"final", state_json(tr.states.back())}};
  out.json_file("simulate.json", j);
}

// Low branch from the linear response; generating branch from a settled
// cold start polished by Newton.
std::vector<FixedPoint> find_fixed_points(const RunConfig& cfg) {
  std::vector<FixedPoint> fps;
  ModeState lin;
  lin.a1 = Complex(0.0, -cfg.drive.Omega1) / Complex(cfg.sys.gamma1, cfg.det.dOmega1);
  lin.a2 = Complex(0.0, -cfg.drive.Omega2) / Complex(cfg.sys.gamma2, cfg.det.Delta2);
  NewtonOptions lowOpt;
  lowOpt.mode = SolveMode::fixed;
  fps.push_back(newton_solve(lin, cfg.sys, cfg.det, cfg.drive, lowOpt));

  // A floor-level seed and one at the generating-branch scale.
  const double ib = generation_intensity(cfg.sys, cfg.det);
  ModeState cold, big;
  cold.a2 = cold.b = Complex(cfg.sweep.fluctuation, 0.0);
  big.a1 = lin.a1;
  big.a2 = Complex(std::sqrt(ib * cfg.sys.gammaB / cfg.sys.gamma2), 0.0);
  big.b = Complex(std::sqrt(ib), 0.0);
  for (const ModeState& init : {cold, big}) {
    const SettleResult s = settle(FrameRhs::rotating(cfg.sys, cfg.det, cfg.drive),
                                  init, cfg.integrator);
    if (!s.state.finite()) continue;
    FixedPoint fp = newton_solve(s.state, cfg.sys, cfg.det, cfg.drive);
    bool duplicate = false;
    for (const auto& q : fps)
      duplicate = duplicate ||
                  (fp.converged == q.converged &&
                   (fp.state.norm() == 0.0 ||
                    std::abs(fp.state.ib() - q.state.ib()) <=
                        1e-6 * (1.0 + q.state.ib())) &&
                   std::abs(fp.state.i1() - q.state.i1()) <=
                       1e-6 * (1.0 + q.state.i1()));
    if (!duplicate) fps.push_back(fp);
  }
  bool any = false;
  for (const auto& fp : fps) any = any || fp.converged;
  if (!any) throw NumericError("Newton did not converge from any start");
  return fps;
}

void cmd_steady(const RunConfig& cfg, const Options& o, OutputSet& out) {
  const auto fps = find_fixed_points(cfg);
  json list = json::array();
  for (const auto& fp : fps) list.push_back(fixed_point_json(fp));
  out.json_file("steady.json", {{"metadata", provenance(cfg, "steady")},
                                {"Omega1", cfg.drive.Omega1},
                                {"Omega2", cfg.drive.Omega2},
                                {"fixedPoints", list}});
  if (!o.branches) return;
  StepControl ctl;
  ctl.Omega1Min = cfg.sweep.omega1.min;
  ctl.Omega1Max = cfg.sweep.omega1.max;
  for (const auto& fp : fps) {
    if (!fp.converged) continue;
    for (int dir : {+1, -1}) {
      ctl.direction = dir;
      const BranchCurve c = continue_branch(fp, cfg.sys, cfg.det, cfg.drive, ctl);
      const std::string name = "branch_" + std::string(branch_name(fp.branch)) +
                               (dir > 0 ? "_up.csv" : "_down.csv");
      write_branch_csv(out.file(name), c);
    }
  }
}

void cmd_stability(const RunConfig& cfg, OutputSet& out) {
  const auto fps = find_fixed_points(cfg);
  json list = json::array();
  std::ostream& csv = out.file("stability.csv");
  write_stability_header(csv);
  for (const auto& fp : fps) {
    if (!fp.converged) continue;
    const StabilityReport r = analyze(fp, cfg.sys, cfg.det);
    write_stability_row(csv, cfg.drive.Omega1, cfg.drive.Omega2, r);
    list.push_back({{"fixedPoint", fixed_point_json(fp)}, {"stability", report_json(r)}});
  }
  out.json_file("stability.json", {{"metadata", provenance(cfg, "stability")},
                                   {"results", list}});
}

void write_sweep_outputs(const SweepResult& r, const RunConfig& cfg,
                         const SweepPlan& plan, const std::string& stem,
                         OutputSet& out) {
  RunConfig used = cfg;
  used.sweep = plan;
  write_sweep_csv(out.file(stem + ".csv"), r);
  json j = sweep_json(r, used, stem);
  j["thresholds"] = thresholds_json(thresholds(cfg.sys, cfg.det), cfg.sys, cfg.det);
  out.json_file(stem + ".json", j);
  if (r.complete) write_threshold_csv(out.file(stem + "_thresholds.csv"), threshold_map(r));
}

void sweep_command(const RunConfig& cfg, const SweepPlan& plan,
                   const std::string& stem, OutputSet& out) {
  const SweepResult r = run_sweep(plan, cfg.sys, cfg.det);
  write_sweep_outputs(r, cfg, plan, stem, out);
  if (!r.complete) {
    out.commit();
    throw PartialSweep("sweep stopped after " + std::to_string(r.tasksDone) +
                       " of " + std::to_string(r.tasksTotal) + " tasks");
  }
  for (std::size_t row = 0; row < r.omega2.size(); ++row) {
    const auto j = r.first_jump(row);
    std::printf("Omega2 = %.6e  jump at Omega1 = %s\n", r.omega2[row],
                j ? std::to_string(*j).c_str() : "none");
  }
}

void cmd_fig5(const RunConfig& cfg, OutputSet& out) {
  json summary = {{"metadata", provenance(cfg, "fig5")},
                  {"thresholds", thresholds_json(thresholds(cfg.sys, cfg.det),
                                                 cfg.sys, cfg.det)}};
  // Along Omega1 every point is reached from its own unseeded state; along
  // Omega2 the path itself is that continuation.
  const auto path1 = omega1_path(cfg);
  std::vector<SpectrumPoint> a;
  for (const auto& d : path1)
    if (auto p = seeded_low_branch(cfg.sys, cfg.det, d, cfg.figures.stabilityPoints - 1))
      a.push_back(*p);
  const auto path2 = omega2_path(cfg);
  const auto b = low_branch_spectrum(path2, cfg.sys, cfg.det);
  const std::pair<const char*, const std::vector<SpectrumPoint>*> parts[] = {
      {"fig5a", &a}, {"fig5b", &b}};
  for (const auto& [name, pts] : parts) {
    std::ostream& csv = out.file(std::string(name) + ".csv");
    write_stability_header(csv);
    for (const auto& p : *pts)
      write_stability_row(csv, p.drive.Omega1, p.drive.Omega2, p.report);
  }
  summary["fig5a"] = {{"requested", path1.size()}, {"tracked", a.size()}};
  summary["fig5b"] = {{"requested", path2.size()}, {"tracked", b.size()}};
  out.json_file("fig5.json", summary);
}

int fail(const std::string& kind, const std::string& msg, int code) {
  std::cerr << error_report(kind, msg, code) << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-excitation optomechanics: simulation, steady states, sweeps"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration file");
    sub->add_option("--preset", o.preset, "bundled configuration (fig2, soft)");
    sub->add_option("--out", o.out, "output directory (default $HARDEXC_OUT_DIR)");
    return sub;
  };
  auto drive = [&](CLI::App* sub) {
    sub->add_option("--omega1", o.omega1Rel, "pump amplitude in units of OmegaTh");
    sub->add_option("--omega2", o.omega2Rel, "seed amplitude in units of OmegaTh");
    return sub;
  };
  auto engine = [&](CLI::App* sub) {
    sub->add_option("--workers", o.workers, "worker threads (default: all cores)");
    sub->add_option("--isa", o.isa, "kernel instruction set: auto, scalar, avx2, avx512");
    sub->add_option("--stop-after", o.stopAfter, "stop after N tasks (testing)")
        ->group("");
    return sub;
  };

  auto* simulate = drive(common(app.add_subcommand("simulate", "integrate one trajectory")));
  simulate->add_option("--t-end", o.tEnd, "end time in seconds");
  auto* steady = drive(common(app.add_subcommand("steady", "stationary states at the drive")));
  steady->add_flag("--branches", o.branches, "continue each state over the sweep Omega1 range");
  auto* stability = drive(common(app.add_subcommand("stability", "eigenvalues at the stationary states")));
  auto* thr = common(app.add_subcommand("thresholds", "closed-form excitation thresholds"));
  auto* sweep = engine(common(app.add_subcommand("sweep", "parameter sweep from the config")));
  sweep->add_option("--protocol", o.protocol, "coldStart, sweepUp or sweepDown");
  auto* fig2 = engine(common(app.add_subcommand("fig2", "intensity rows at three seed amplitudes")));
  auto* fig3 = engine(common(app.add_subcommand("fig3", "(Omega1, Omega2) intensity maps")));
  auto* fig4 = engine(common(app.add_subcommand("fig4", "rows for the soft-excitation scenario")));
  auto* fig5 = common(app.add_subcommand("fig5", "low-branch eigenvalues along Omega1 and Omega2"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kConfig);
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const RunConfig cfg = resolve(o, cmd == fig4 ? "soft" : "fig2");
    OutputSet out(out_dir(o, cfg));
    if (cmd == simulate) cmd_simulate(cfg, out);
    else if (cmd == steady) cmd_steady(cfg, o, out);
    else if (cmd == stability) cmd_stability(cfg, out);
    else if (cmd == thr) cmd_thresholds(cfg, out);
    else if (cmd == sweep) sweep_command(cfg, cfg.sweep, "sweep", out);
    else if (cmd == fig2) sweep_command(cfg, rows_plan(cfg), "fig2", out);
    else if (cmd == fig3) sweep_command(cfg, map_plan(cfg), "fig3", out);
    else if (cmd == fig4) sweep_command(cfg, rows_plan(cfg), "fig4", out);
    else if (cmd == fig5) cmd_fig5(cfg, out);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.json_file("metadata.json", run_metadata(cfg, name, wall));
    out.commit();
    return kOk;
  } catch (const ConfigError& e) {
    return fail("config", e.what(), kConfig);
  } catch (const PartialSweep& e) {
    return fail("partial", e.what(), kPartial);
  } catch (const OutputError& e) {
    return fail("output", e.what(), kIo);
  } catch (const std::filesystem::filesystem_error& e) {
    return fail("output", e.what(), kIo);
  } catch (const std::exception& e) {
    return fail("numeric", e.what(), kNumeric);
  }
}
