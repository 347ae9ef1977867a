#include "hardexc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "hardexc/stability.hpp"

namespace hardexc {

using nlohmann::json;

namespace {

// Object reader that remembers which keys were consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    std::string where = path_;
    if (!key.empty()) where += (where.empty() ? "" : ".") + key;
    throw ConfigError((where.empty() ? std::string("config") : where) + ": " +
                      msg);
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& get(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "must be finite");
    return d;
  }

  /// rad/s from `key` or 2pi * `key_hz`.
  double frequency(const std::string& key, double fallback) {
    const std::string hz = key + "_hz";
    if (has(key) && has(hz)) fail(key, "give either " + key + " or " + hz);
    if (has(hz)) return kTwoPi * number(hz, 0.0);
    return number(key, fallback);
  }

  bool has_frequency(const std::string& key) const {
    return has(key) || has(key + "_hz");
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      fail(key, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key())) fail(item.key(), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

double amplitude(Reader& r, const std::string& key, double fallback,
                 double omegaTh) {
  if (!r.has(key)) return fallback;
  const json& v = r.get(key);
  double out;
  if (v.is_number()) {
    out = v.get<double>();
  } else if (v.is_object()) {
    Reader sub(v, r.child(key));
    if (!sub.has("relative_to_th")) sub.fail("", "expected relative_to_th");
    out = sub.number("relative_to_th", 0.0) * omegaTh;
    sub.finish();
  } else {
    r.fail(key, "expected a number or {\"relative_to_th\": x}");
  }
  if (!std::isfinite(out) || out < 0.0)
    r.fail(key, "amplitudes must be finite and >= 0");
  return out;
}

Complex complex_pair(Reader& r, const std::string& key) {
  if (!r.has(key)) return {};
  const json& v = r.get(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    r.fail(key, "expected [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

Axis read_axis(Reader& parent, const std::string& key, const Axis& fallback,
               double omegaTh) {
  if (!parent.has(key)) return fallback;
  Reader r(parent.get(key), parent.child(key));
  Axis a;
  a.min = amplitude(r, "min", fallback.min, omegaTh);
  a.max = amplitude(r, "max", fallback.max, omegaTh);
  a.count = r.count("count", fallback.count);
  try {
    a.spacing = parse_spacing(r.text("spacing", "linear"));
  } catch (const std::invalid_argument& e) {
    r.fail("spacing", e.what());
  }
  r.finish();
  try {
    a.validate(key.c_str());
  } catch (const std::invalid_argument& e) {
    parent.fail(key, e.what());
  }
  return a;
}

json axis_json(const Axis& a) {
  return {{"min", a.min},
          {"max", a.max},
          {"count", a.count},
          {"spacing", std::string(spacing_name(a.spacing))}};
}

json pair_json(Complex z) { return json::array({z.real(), z.imag()}); }

template <class F>
void guarded(Reader& r, const std::string& key, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    r.fail(key, e.what());
  }
}

}  // namespace

static RunConfig load_impl(const json& j) {
  RunConfig cfg;
  Reader root(j, "");

  if (!root.has("system")) root.fail("system", "missing");
  {
    Reader r(root.get("system"), "system");
    auto& s = cfg.sys;
    s.gamma1 = r.frequency("gamma1", 0.0);
    s.gamma2 = r.frequency("gamma2", 0.0);
    s.gammaB = r.frequency("gammaB", 0.0);
    s.omega1 = r.frequency("omega1", 0.0);
    s.omega2 = r.frequency("omega2", 0.0);
    s.omegaB = r.frequency("omegaB", 0.0);
    s.g = r.frequency("g", 0.0);
    r.finish();
    guarded(r, "", [&] { s.validate(); });
  }

  // Drive carrier first: it may define the detunings.
  bool havePump = false;
  double pump = 0.0;
  if (root.has("drive")) {
    const json& d = j.at("drive");
    if (d.is_object() && (d.contains("pump") || d.contains("pump_hz"))) {
      havePump = true;
      pump = d.contains("pump_hz") ? kTwoPi * d.at("pump_hz").get<double>()
                                   : d.at("pump").get<double>();
    }
  }

  if (root.has("detuning")) {
    if (havePump) root.fail("detuning", "give either detuning or drive.pump");
    Reader r(root.get("detuning"), "detuning");
    if (!r.has_frequency("dOmega1") || !r.has_frequency("dOmegaB"))
      r.fail("", "needs dOmega1 and dOmegaB");
    const double d1 = r.frequency("dOmega1", 0.0);
    const double db = r.frequency("dOmegaB", 0.0);
    const double D2 = r.frequency("Delta2", 0.0);
    cfg.det = Detunings::direct(d1, db, cfg.sys.omegaB, D2);
    if (r.has_frequency("dOmega2")) cfg.det.dOmega2 = r.frequency("dOmega2", 0.0);
    r.finish();
  } else if (havePump) {
    DriveParams tmp;
    tmp.omegaPump = pump;
    cfg.det = Detunings::from(cfg.sys, tmp);
  } else {
    root.fail("detuning", "missing (or set drive.pump with mode frequencies)");
  }
  const double omegaTh = thresholds(cfg.sys, cfg.det).OmegaTh;

  cfg.drive.omegaPump = havePump ? pump : cfg.sys.omega1 - cfg.det.dOmega1;
  if (root.has("drive")) {
    Reader r(root.get("drive"), "drive");
    cfg.drive.Omega1 = amplitude(r, "Omega1", 0.0, omegaTh);
    cfg.drive.Omega2 = amplitude(r, "Omega2", 0.0, omegaTh);
    if (havePump) r.frequency("pump", 0.0);
    r.finish();
  }

  if (root.has("integrator")) {
    Reader r(root.get("integrator"), "integrator");
    auto& c = cfg.integrator;
    c.relTol = r.number("relTol", c.relTol);
    c.absTol = r.number("absTol", c.absTol);
    c.dtInit = r.number("dtInit", c.dtInit);
    c.dtMax = r.number("dtMax", c.dtMax);
    c.maxSteps = r.count("maxSteps", c.maxSteps);
    c.steadyWindow = r.number("steadyWindow", c.steadyWindow);
    c.steadyEps = r.number("steadyEps", c.steadyEps);
    c.detectSteady = r.boolean("detectSteady", c.detectSteady);
    c.settleCap = r.number("settleCap", c.settleCap);
    c.sampleStride = r.number("sampleStride", c.sampleStride);
    r.finish();
    guarded(r, "", [&] { c.validate(); });
  }

  if (root.has("simulate")) {
    Reader r(root.get("simulate"), "simulate");
    auto& s = cfg.simulate;
    s.tEnd = r.number("tEnd", 0.0);
    if (s.tEnd < 0.0) r.fail("tEnd", "must be >= 0");
    const std::string frame = r.text("frame", "rotating");
    if (frame == "rotating")
      s.frame = Frame::rotating;
    else if (frame == "lab")
      s.frame = Frame::lab;
    else
      r.fail("frame", "expected rotating or lab");
    s.fluctuation = r.number("fluctuation", s.fluctuation);
    if (s.fluctuation < 0.0) r.fail("fluctuation", "must be >= 0");
    if (r.has("init")) {
      Reader in(r.get("init"), r.child("init"));
      s.init.a1 = complex_pair(in, "a1");
      s.init.a2 = complex_pair(in, "a2");
      s.init.b = complex_pair(in, "b");
      in.finish();
      if (!s.init.finite()) in.fail("", "amplitudes must be finite");
    }
    r.finish();
  }

  auto& plan = cfg.sweep;
  plan.integrator = cfg.integrator;
  plan.omega1 = Axis{0.0, 1.2 * omegaTh, 200, Spacing::linear};
  plan.omega2Values = {cfg.drive.Omega2};
  if (root.has("sweep")) {
    Reader r(root.get("sweep"), "sweep");
    plan.omega1 = read_axis(r, "omega1", plan.omega1, omegaTh);
    if (r.has("omega2") && r.has("omega2_values"))
      r.fail("omega2", "give either omega2 or omega2_values");
    if (r.has("omega2")) {
      plan.omega2 = read_axis(r, "omega2", Axis{}, omegaTh);
      plan.omega2Values.clear();
    }
    if (r.has("omega2_values")) {
      const json& v = r.get("omega2_values");
      if (!v.is_array() || v.empty()) r.fail("omega2_values", "expected a list");
      plan.omega2Values.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        json wrap = {{"v", v[i]}};
        Reader w(wrap, r.child("omega2_values[" + std::to_string(i) + "]"));
        plan.omega2Values.push_back(amplitude(w, "v", 0.0, omegaTh));
      }
    }
    guarded(r, "protocol", [&] {
      plan.protocol = parse_protocol(r.text("protocol", "coldStart"));
    });
    plan.fluctuation = r.number("fluctuation", plan.fluctuation);
    plan.jumpFactor = r.number("jumpFactor", plan.jumpFactor);
    plan.workers = r.count("workers", plan.workers);
    const std::string isa = r.text("isa", "auto");
    guarded(r, "isa", [&] {
      plan.isa = isa == "auto" ? kernels::default_isa() : kernels::parse_isa(isa);
    });
    plan.checkpoint = r.text("checkpoint", "");
    r.finish();
    guarded(r, "", [&] { plan.validate(); });
  }

  if (root.has("figures")) {
    Reader r(root.get("figures"), "figures");
    auto& f = cfg.figures;
    f.omega1Points = r.count("omega1Points", f.omega1Points);
    f.omega1MaxRel = r.number("omega1MaxRel", f.omega1MaxRel);
    f.omega2Rows = r.count("omega2Rows", f.omega2Rows);
    f.omega2MaxRel = r.number("omega2MaxRel", f.omega2MaxRel);
    if (r.has("rowsRel")) {
      const json& v = r.get("rowsRel");
      if (!v.is_array() || v.empty()) r.fail("rowsRel", "expected a list");
      f.rowsRel.clear();
      for (const auto& x : v) {
        if (!x.is_number() || x.get<double>() < 0.0)
          r.fail("rowsRel", "expected non-negative numbers");
        f.rowsRel.push_back(x.get<double>());
      }
    }
    f.stabilityPoints = r.count("stabilityPoints", f.stabilityPoints);
    f.fig5Omega2Rel = r.number("fig5Omega2Rel", f.fig5Omega2Rel);
    f.fig5Omega1Rel = r.number("fig5Omega1Rel", f.fig5Omega1Rel);
    r.finish();
    if (f.omega1Points < 2 || f.omega2Rows < 2 || f.stabilityPoints < 2)
      r.fail("", "point counts must be >= 2");
    if (!(f.omega1MaxRel > 0.0) || !(f.omega2MaxRel > 0.0))
      r.fail("", "ranges must be > 0");
  }

  cfg.outDir = root.text("output", "");
  root.finish();
  guarded(root, "drive", [&] { cfg.drive.validate(); });
  return cfg;
}

RunConfig load_config(const json& j) {
  try {
    return load_impl(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return load_config(j);
}

json to_json(const RunConfig& cfg) {
  json j;
  const auto& s = cfg.sys;
  j["system"] = {{"gamma1", s.gamma1}, {"gamma2", s.gamma2},
                 {"gammaB", s.gammaB}, {"omega1", s.omega1},
                 {"omega2", s.omega2}, {"omegaB", s.omegaB},
                 {"g", s.g}};
  j["detuning"] = {{"dOmega1", cfg.det.dOmega1},
                   {"dOmega2", cfg.det.dOmega2},
                   {"Delta2", cfg.det.Delta2},
                   {"dOmegaB", cfg.det.dOmegaB}};
  j["drive"] = {{"Omega1", cfg.drive.Omega1}, {"Omega2", cfg.drive.Omega2}};
  const auto& c = cfg.integrator;
  j["integrator"] = {{"relTol", c.relTol},
                     {"absTol", c.absTol},
                     {"dtInit", c.dtInit},
                     {"dtMax", c.dtMax},
                     {"maxSteps", c.maxSteps},
                     {"steadyWindow", c.steadyWindow},
                     {"steadyEps", c.steadyEps},
                     {"detectSteady", c.detectSteady},
                     {"settleCap", c.settleCap},
                     {"sampleStride", c.sampleStride}};
  j["simulate"] = {
      {"tEnd", cfg.simulate.tEnd},
      {"frame", cfg.simulate.frame == Frame::lab ? "lab" : "rotating"},
      {"fluctuation", cfg.simulate.fluctuation},
      {"init",
       {{"a1", pair_json(cfg.simulate.init.a1)},
        {"a2", pair_json(cfg.simulate.init.a2)},
        {"b", pair_json(cfg.simulate.init.b)}}}};
  const auto& p = cfg.sweep;
  json sw = {{"omega1", axis_json(p.omega1)},
             {"protocol", std::string(protocol_name(p.protocol))},
             {"fluctuation", p.fluctuation},
             {"jumpFactor", p.jumpFactor},
             {"workers", p.workers},
             {"isa", std::string(kernels::isa_name(p.isa))},
             {"checkpoint", p.checkpoint}};
  if (p.omega2)
    sw["omega2"] = axis_json(*p.omega2);
  else
    sw["omega2_values"] = p.omega2Values;
  j["sweep"] = sw;
  const auto& f = cfg.figures;
  j["figures"] = {{"omega1Points", f.omega1Points},
                  {"omega1MaxRel", f.omega1MaxRel},
                  {"omega2Rows", f.omega2Rows},
                  {"omega2MaxRel", f.omega2MaxRel},
                  {"rowsRel", f.rowsRel},
                  {"stabilityPoints", f.stabilityPoints},
                  {"fig5Omega2Rel", f.fig5Omega2Rel},
                  {"fig5Omega1Rel", f.fig5Omega1Rel}};
  j["output"] = cfg.outDir;
  return j;
}

bool same_config(const RunConfig& a, const RunConfig& b) {
  auto sysEq = [](const SystemParams& x, const SystemParams& y) {
    return x.gamma1 == y.gamma1 && x.gamma2 == y.gamma2 &&
           x.gammaB == y.gammaB && x.omega1 == y.omega1 &&
           x.omega2 == y.omega2 && x.omegaB == y.omegaB && x.g == y.g;
  };
  auto detEq = [](const Detunings& x, const Detunings& y) {
    return x.dOmega1 == y.dOmega1 && x.dOmega2 == y.dOmega2 &&
           x.Delta2 == y.Delta2 && x.dOmegaB == y.dOmegaB;
  };
  auto intEq = [](const IntegratorConfig& x, const IntegratorConfig& y) {
    return x.relTol == y.relTol && x.absTol == y.absTol &&
           x.dtInit == y.dtInit && x.dtMax == y.dtMax &&
           x.maxSteps == y.maxSteps && x.steadyWindow == y.steadyWindow &&
           x.steadyEps == y.steadyEps && x.detectSteady == y.detectSteady &&
           x.settleCap == y.settleCap && x.sampleStride == y.sampleStride;
  };
  auto axisEq = [](const Axis& x, const Axis& y) {
    return x.min == y.min && x.max == y.max && x.count == y.count &&
           x.spacing == y.spacing;
  };
  const auto& p = a.sweep;
  const auto& q = b.sweep;
  const bool o2Eq = p.omega2.has_value() == q.omega2.has_value() &&
                    (!p.omega2 || axisEq(*p.omega2, *q.omega2));
  const auto& f = a.figures;
  const auto& h = b.figures;
  return sysEq(a.sys, b.sys) && detEq(a.det, b.det) &&
         a.drive.Omega1 == b.drive.Omega1 && a.drive.Omega2 == b.drive.Omega2 &&
         intEq(a.integrator, b.integrator) &&
         a.simulate.tEnd == b.simulate.tEnd &&
         a.simulate.frame == b.simulate.frame &&
         a.simulate.init == b.simulate.init &&
         a.simulate.fluctuation == b.simulate.fluctuation && axisEq(p.omega1, q.omega1) &&
         o2Eq && p.omega2Values == q.omega2Values &&
         p.protocol == q.protocol && p.fluctuation == q.fluctuation &&
         p.jumpFactor == q.jumpFactor && p.workers == q.workers &&
         p.isa == q.isa && p.checkpoint == q.checkpoint &&
         intEq(p.integrator, q.integrator) &&
         f.omega1Points == h.omega1Points && f.omega1MaxRel == h.omega1MaxRel &&
         f.omega2Rows == h.omega2Rows && f.omega2MaxRel == h.omega2MaxRel &&
         f.rowsRel == h.rowsRel && f.stabilityPoints == h.stabilityPoints &&
         f.fig5Omega2Rel == h.fig5Omega2Rel &&
         f.fig5Omega1Rel == h.fig5Omega1Rel && a.outDir == b.outDir;
}

}  // namespace hardexc

namespace hardexc {

namespace {

SweepPlan figure_base(const RunConfig& cfg) {
  const double th = thresholds(cfg.sys, cfg.det).OmegaTh;
  SweepPlan plan = cfg.sweep;
  plan.protocol = Protocol::coldStart;
  plan.omega1 = Axis{0.0, cfg.figures.omega1MaxRel * th,
                     cfg.figures.omega1Points, Spacing::linear};
  plan.omega2.reset();
  plan.omega2Values.clear();
  return plan;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  return Axis{lo, hi, n, Spacing::linear}.values();
}

}  // namespace

SweepPlan rows_plan(const RunConfig& cfg) {
  const double th = thresholds(cfg.sys, cfg.det).OmegaTh;
  SweepPlan plan = figure_base(cfg);
  for (double r : cfg.figures.rowsRel) plan.omega2Values.push_back(r * th);
  return plan;
}

SweepPlan map_plan(const RunConfig& cfg) {
  const double th = thresholds(cfg.sys, cfg.det).OmegaTh;
  SweepPlan plan = figure_base(cfg);
  plan.omega2 = Axis{0.0, cfg.figures.omega2MaxRel * th, cfg.figures.omega2Rows,
                     Spacing::linear};
  return plan;
}

std::vector<DriveParams> omega1_path(const RunConfig& cfg) {
  const double th = thresholds(cfg.sys, cfg.det).OmegaTh;
  std::vector<DriveParams> path;
  for (double O1 : linspace(0.0, cfg.figures.omega1MaxRel * th,
                            cfg.figures.stabilityPoints)) {
    DriveParams d = cfg.drive;
    d.Omega1 = O1;
    d.Omega2 = cfg.figures.fig5Omega2Rel * th;
    path.push_back(d);
  }
  return path;
}

std::vector<DriveParams> omega2_path(const RunConfig& cfg) {
  const double th = thresholds(cfg.sys, cfg.det).OmegaTh;
  std::vector<DriveParams> path;
  for (double O2 : linspace(0.0, cfg.figures.omega2MaxRel * th,
                            cfg.figures.stabilityPoints)) {
    DriveParams d = cfg.drive;
    d.Omega1 = cfg.figures.fig5Omega1Rel * th;
    d.Omega2 = O2;
    path.push_back(d);
  }
  return path;
}

}  // namespace hardexc
