#pragma once

// On-disk sweep progress: a JSON manifest listing finished tasks plus one
// CSV shard per task.  Files are written to a temporary name and renamed,
// so a killed run leaves either the old or the new version.

#include <cstddef>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "hardexc/sweep.hpp"

namespace hardexc::detail {

class Checkpoint {
 public:
  Checkpoint() = default;
  /// Opens (or creates) `dir`.  An existing manifest with a different
  /// fingerprint or task count raises SweepError.
  Checkpoint(std::string dir, std::string fingerprint, std::size_t tasks);

  bool enabled() const { return !dir_.empty(); }
  bool has(std::size_t task) const;
  std::vector<SweepPoint> load(std::size_t task) const;
  /// Thread-safe.
  void store(std::size_t task, const std::vector<SweepPoint>& points);

 private:
  std::string shard_path(std::size_t task) const;
  void write_manifest() const;

  std::string dir_;
  std::string fingerprint_;
  std::size_t tasks_ = 0;
  std::set<std::size_t> done_;
  mutable std::mutex mu_;
};

/// Shard row encoding, exposed for tests.
std::string encode_point(const SweepPoint& p);
SweepPoint decode_point(const std::string& line);

}  // namespace hardexc::detail
