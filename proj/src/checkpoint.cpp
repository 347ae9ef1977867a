#include "detail/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hardexc::detail {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormat = "hardexc-checkpoint/1";

void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw SweepError("cannot write " + tmp.string());
    os << text;
    os.flush();
    if (!os) throw SweepError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

std::string encode_point(const SweepPoint& p) {
  const ModeState& s = p.state;
  const double cols[] = {p.Omega1,       p.Omega2,      p.intensity[0],
                         p.intensity[1], p.intensity[2], s.a1.real(),
                         s.a1.imag(),    s.a2.real(),   s.a2.imag(),
                         s.b.real(),     s.b.imag(),    p.wallTime};
  std::string out;
  char buf[40];
  for (double v : cols) {
    std::snprintf(buf, sizeof buf, "%.17g,", v);
    out += buf;
  }
  out += p.settled ? "1," : "0,";
  out += termination_name(p.reason);
  return out;
}

SweepPoint decode_point(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) f.push_back(item);
  if (f.size() != 14) throw SweepError("corrupt checkpoint row: " + line);
  double v[12];
  for (int i = 0; i < 12; ++i) {
    char* end = nullptr;
    v[i] = std::strtod(f[i].c_str(), &end);
    if (end == f[i].c_str() || *end != '\0')
      throw SweepError("corrupt checkpoint value: " + f[i]);
  }
  SweepPoint p;
  p.Omega1 = v[0];
  p.Omega2 = v[1];
  p.intensity = {v[2], v[3], v[4]};
  p.state = {{v[5], v[6]}, {v[7], v[8]}, {v[9], v[10]}};
  p.wallTime = v[11];
  p.settled = f[12] == "1";
  p.reason = parse_termination(f[13]);
  return p;
}

Checkpoint::Checkpoint(std::string dir, std::string fingerprint,
                       std::size_t tasks)
    : dir_(std::move(dir)), fingerprint_(std::move(fingerprint)),
      tasks_(tasks) {
  fs::create_directories(dir_);
  const fs::path manifest = fs::path(dir_) / "manifest.json";
  if (!fs::exists(manifest)) {
    write_manifest();
    return;
  }
  std::ifstream is(manifest);
  json m;
  try {
    is >> m;
  } catch (const json::exception& e) {
    throw SweepError("unreadable checkpoint manifest: " + std::string(e.what()));
  }
  if (m.value("format", "") != kFormat)
    throw SweepError("checkpoint format mismatch in " + manifest.string());
  if (m.value("fingerprint", "") != fingerprint_)
    throw SweepError("checkpoint " + dir_ +
                     " belongs to a different sweep (fingerprint mismatch)");
  if (m.value("tasks", std::size_t{0}) != tasks_)
    throw SweepError("checkpoint task count mismatch");
  for (std::size_t t : m.at("done"))
    if (fs::exists(shard_path(t))) done_.insert(t);
}

bool Checkpoint::has(std::size_t task) const {
  std::lock_guard lock(mu_);
  return done_.count(task) != 0;
}

std::string Checkpoint::shard_path(std::size_t task) const {
  char name[32];
  std::snprintf(name, sizeof name, "shard_%06zu.csv", task);
  return (fs::path(dir_) / name).string();
}

std::vector<SweepPoint> Checkpoint::load(std::size_t task) const {
  std::ifstream is(shard_path(task));
  if (!is) throw SweepError("missing checkpoint shard " + shard_path(task));
  std::vector<SweepPoint> out;
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line))
    if (!line.empty()) out.push_back(decode_point(line));
  return out;
}

void Checkpoint::store(std::size_t task,
                       const std::vector<SweepPoint>& points) {
  std::string text =
      "Omega1,Omega2,I1,I2,Ib,re_a1,im_a1,re_a2,im_a2,re_b,im_b,wall,settled,"
      "reason\n";
  for (const auto& p : points) text += encode_point(p) + "\n";
  write_atomic(shard_path(task), text);
  std::lock_guard lock(mu_);
  done_.insert(task);
  write_manifest();
}

void Checkpoint::write_manifest() const {
  json m;
  m["format"] = kFormat;
  m["fingerprint"] = fingerprint_;
  m["tasks"] = tasks_;
  m["done"] = json::array();
  for (std::size_t t : done_) m["done"].push_back(t);
  write_atomic(fs::path(dir_) / "manifest.json", m.dump(2) + "\n");
}

}  // namespace hardexc::detail
