#include "hardexc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "detail/checkpoint.hpp"

namespace hardexc {

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::coldStart:
      return "coldStart";
    case Protocol::sweepUp:
      return "sweepUp";
    case Protocol::sweepDown:
      break;
  }
  return "sweepDown";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "coldStart") return Protocol::coldStart;
  if (name == "sweepUp") return Protocol::sweepUp;
  if (name == "sweepDown") return Protocol::sweepDown;
  throw std::invalid_argument("unknown protocol: " + std::string(name));
}

std::string_view spacing_name(Spacing s) {
  return s == Spacing::linear ? "linear" : "log";
}

Spacing parse_spacing(std::string_view name) {
  if (name == "linear") return Spacing::linear;
  if (name == "log") return Spacing::log;
  throw std::invalid_argument("unknown spacing: " + std::string(name));
}

void Axis::validate(const char* name) const {
  const std::string n(name);
  if (count < 2) throw std::invalid_argument(n + ": count must be >= 2");
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max))
    throw std::invalid_argument(n + ": need finite min < max");
  if (min < 0.0) throw std::invalid_argument(n + ": amplitudes are >= 0");
  if (spacing == Spacing::log && !(min > 0.0))
    throw std::invalid_argument(n + ": log spacing needs min > 0");
}

std::vector<double> Axis::values() const {
  std::vector<double> v(count);
  const double last = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / last;
    if (spacing == Spacing::linear)
      v[i] = min + (max - min) * f;
    else
      v[i] = min * std::pow(max / min, f);
  }
  v.back() = max;
  return v;
}

void SweepPlan::validate() const {
  omega1.validate("omega1");
  if (omega2) omega2->validate("omega2");
  if (omega2 && !omega2Values.empty())
    throw std::invalid_argument("give either an omega2 axis or omega2 values");
  for (double v : omega2Values)
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("omega2 values must be finite and >= 0");
  if (!(fluctuation >= 0.0) || !std::isfinite(fluctuation))
    throw std::invalid_argument("fluctuation must be finite and >= 0");
  if (!(jumpFactor > 1.0)) throw std::invalid_argument("jumpFactor must be > 1");
  integrator.validate();
  if (!kernels::isa_supported(isa))
    throw std::invalid_argument("instruction set not supported here: " +
                                std::string(kernels::isa_name(isa)));
}

std::vector<double> SweepPlan::omega2_grid() const {
  if (omega2) return omega2->values();
  if (!omega2Values.empty()) return omega2Values;
  return {0.0};
}

std::vector<double> SweepResult::row_ib(std::size_t row) const {
  std::vector<double> ib(omega1.size());
  for (std::size_t i = 0; i < omega1.size(); ++i) ib[i] = at(row, i).intensity[2];
  return ib;
}

std::optional<double> SweepResult::first_jump(std::size_t row) const {
  if (row >= jumps.size() || jumps[row].empty()) return std::nullopt;
  return omega1[jumps[row].front() + 1];
}

std::vector<std::size_t> detect_jump(const std::vector<double>& ib,
                                     double factor, double floorFraction) {
  std::vector<std::size_t> out;
  if (ib.size() < 2) return out;
  double top = 0.0;
  for (double v : ib)
    if (std::isfinite(v)) top = std::max(top, v);
  const double floor = floorFraction * top;
  for (std::size_t k = 0; k + 1 < ib.size(); ++k) {
    const double lo = std::max(ib[k], floor);
    if (lo > 0.0 && ib[k + 1] >= factor * lo) out.push_back(k);
  }
  return out;
}

static Complex raise(Complex z, double floor) {
  const double m = std::abs(z);
  if (m >= floor) return z;
  if (m == 0.0) return Complex(floor, 0.0);
  return z * (floor / m);
}

ModeState with_floor(ModeState s, double eps) {
  s.a2 = raise(s.a2, eps);
  s.b = raise(s.b, eps);
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SweepPoint to_point(double O1, double O2, const SettleResult& r, double wall) {
  SweepPoint p;
  p.Omega1 = O1;
  p.Omega2 = O2;
  p.settled = r.settled;
  p.reason = r.reason;
  p.state = r.state;
  p.intensity = r.meanIntensity;
  p.wallTime = wall;
  return p;
}

// Contiguous slice of the row-major grid handled as one unit of work.
struct Task {
  std::size_t first = 0;
  std::size_t count = 0;
  std::size_t row = 0;  // hysteresis protocols: the row
};

constexpr std::size_t kColdChunk = 32;

std::vector<Task> make_tasks(const SweepPlan& plan, std::size_t n1,
                             std::size_t n2) {
  std::vector<Task> tasks;
  if (plan.protocol == Protocol::coldStart) {
    const std::size_t total = n1 * n2;
    for (std::size_t f = 0; f < total; f += kColdChunk)
      tasks.push_back({f, std::min(kColdChunk, total - f), f / n1});
  } else {
    for (std::size_t r = 0; r < n2; ++r) tasks.push_back({r * n1, n1, r});
  }
  return tasks;
}

std::vector<SweepPoint> run_task(const Task& task, const SweepPlan& plan,
                                 const SystemParams& sys, const Detunings& det,
                                 const std::vector<double>& o1,
                                 const std::vector<double>& o2) {
  const std::size_t n1 = o1.size();
  std::vector<SweepPoint> out;
  out.reserve(task.count);
  ModeState cold = with_floor(ModeState{}, plan.fluctuation);

  if (plan.protocol == Protocol::coldStart) {
    std::vector<DriveParams> drives(task.count);
    std::vector<ModeState> inits(task.count, cold);
    for (std::size_t k = 0; k < task.count; ++k) {
      const std::size_t g = task.first + k;
      drives[k].Omega1 = o1[g % n1];
      drives[k].Omega2 = o2[g / n1];
    }
    const auto t0 = Clock::now();
    const auto res = settle_batch(sys, det, drives, inits, plan.integrator,
                                  plan.isa);
    const double wall = seconds_since(t0) / static_cast<double>(task.count);
    for (std::size_t k = 0; k < task.count; ++k)
      out.push_back(to_point(drives[k].Omega1, drives[k].Omega2, res[k], wall));
    return out;
  }

  // Hysteresis: walk the row, seeding each point with the previous state.
  std::vector<SweepPoint> row(n1);
  ModeState seed = cold;
  for (std::size_t step = 0; step < n1; ++step) {
    const std::size_t i =
        plan.protocol == Protocol::sweepUp ? step : n1 - 1 - step;
    DriveParams d;
    d.Omega1 = o1[i];
    d.Omega2 = o2[task.row];
    const auto t0 = Clock::now();
    const auto res = settle_batch(sys, det, std::span(&d, 1),
                                  std::span(&seed, 1), plan.integrator,
                                  plan.isa);
    row[i] = to_point(d.Omega1, d.Omega2, res[0], seconds_since(t0));
    seed = with_floor(res[0].state, plan.fluctuation);
  }
  return row;
}

}  // namespace

SweepResult run_sweep(const SweepPlan& plan, const SystemParams& sys,
                      const Detunings& det) {
  plan.validate();
  sys.validate();

  SweepResult result;
  result.omega1 = plan.omega1_grid();
  result.omega2 = plan.omega2_grid();
  const std::size_t n1 = result.omega1.size(), n2 = result.omega2.size();
  result.points.resize(n1 * n2);
  for (std::size_t r = 0; r < n2; ++r)
    for (std::size_t i = 0; i < n1; ++i) {
      result.points[r * n1 + i].Omega1 = result.omega1[i];
      result.points[r * n1 + i].Omega2 = result.omega2[r];
    }

  const auto tasks = make_tasks(plan, n1, n2);
  result.tasksTotal = tasks.size();
  std::optional<detail::Checkpoint> ckpt;
  if (!plan.checkpoint.empty())
    ckpt.emplace(plan.checkpoint, sweep_fingerprint(plan, sys, det),
                 tasks.size());

  std::vector<std::size_t> pending;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (ckpt && ckpt->has(t)) {
      const auto pts = ckpt->load(t);
      if (pts.size() != tasks[t].count)
        throw SweepError("checkpoint shard has the wrong size");
      std::copy(pts.begin(), pts.end(),
                result.points.begin() +
                    static_cast<std::ptrdiff_t>(tasks[t].first));
      ++result.tasksDone;
    } else {
      pending.push_back(t);
    }
  }

  std::size_t workers = plan.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::max<std::size_t>(1, std::min(workers, pending.size()));

  std::atomic<std::size_t> started{0}, finished{0};
  std::mutex errMu;
  std::exception_ptr error;

  auto worker = [&](std::size_t w) {
    for (std::size_t j = w; j < pending.size(); j += workers) {
      if (plan.stopAfter > 0 && started.fetch_add(1) >= plan.stopAfter) return;
      {
        std::lock_guard lock(errMu);
        if (error) return;
      }
      const std::size_t t = pending[j];
      try {
        auto pts = run_task(tasks[t], plan, sys, det, result.omega1,
                            result.omega2);
        if (ckpt) ckpt->store(t, pts);
        std::copy(pts.begin(), pts.end(),
                  result.points.begin() +
                      static_cast<std::ptrdiff_t>(tasks[t].first));
        finished.fetch_add(1);
      } catch (...) {
        std::lock_guard lock(errMu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  result.tasksDone += finished.load();
  result.complete = result.tasksDone == result.tasksTotal;
  result.jumps.resize(n2);
  for (std::size_t r = 0; r < n2; ++r)
    result.jumps[r] = detect_jump(result.row_ib(r), plan.jumpFactor);
  return result;
}

ThresholdMap threshold_map(const SweepResult& result) {
  ThresholdMap m;
  std::optional<double> last;
  for (std::size_t r = 0; r < result.omega2.size(); ++r) {
    ThresholdRow row;
    row.Omega2 = result.omega2[r];
    row.jumpOmega1 = result.first_jump(r);
    if (row.jumpOmega1) {
      row.combined = *row.jumpOmega1 * *row.jumpOmega1 + row.Omega2 * row.Omega2;
      ++m.rowsWithJump;
      if (last && *row.jumpOmega1 > *last) m.nonIncreasing = false;
      last = row.jumpOmega1;
    }
    m.rows.push_back(row);
  }
  return m;
}

ThresholdMap threshold_map(const SweepPlan& plan, const SystemParams& sys,
                           const Detunings& det) {
  if (!plan.omega2 && plan.omega2Values.size() < 2)
    throw std::invalid_argument("threshold_map needs several Omega2 rows");
  return threshold_map(run_sweep(plan, sys, det));
}

namespace {

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << "Omega1,Omega2,I1,I2,Ib,settled\n";
  for (const auto& p : r.points) {
    put(os, p.Omega1);
    os << ',';
    put(os, p.Omega2);
    for (double v : p.intensity) {
      os << ',';
      put(os, v);
    }
    os << ',' << (p.settled ? 1 : 0) << '\n';
  }
}

void write_threshold_csv(std::ostream& os, const ThresholdMap& m) {
  os << "Omega2,jump_Omega1,combined\n";
  for (const auto& row : m.rows) {
    put(os, row.Omega2);
    os << ',';
    if (row.jumpOmega1) put(os, *row.jumpOmega1);
    os << ',';
    if (row.combined) put(os, *row.combined);
    os << '\n';
  }
}

std::string sweep_fingerprint(const SweepPlan& plan, const SystemParams& sys,
                              const Detunings& det) {
  std::string text;
  char buf[64];
  auto add = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g;", v);
    text += buf;
  };
  for (double v : {sys.gamma1, sys.gamma2, sys.gammaB, sys.omega1, sys.omega2,
                   sys.omegaB, sys.g, det.dOmega1, det.dOmega2, det.Delta2,
                   det.dOmegaB})
    add(v);
  for (double v : plan.omega1_grid()) add(v);
  text += "|";
  for (double v : plan.omega2_grid()) add(v);
  text += std::string(protocol_name(plan.protocol)) + "|";
  const auto& c = plan.integrator;
  for (double v : {c.relTol, c.absTol, c.dtInit, c.dtMax,
                   static_cast<double>(c.maxSteps), c.steadyWindow,
                   c.steadyEps, c.detectSteady ? 1.0 : 0.0, c.settleCap,
                   plan.fluctuation, plan.jumpFactor})
    add(v);
  // FNV-1a, 64 bit.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hardexc
