#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "overdeck/cluster.hpp"
#include "overdeck/errors.hpp"
#include "overdeck/gpu_cost.hpp"

namespace overdeck {

struct StepSample {
  VpId vp = 0;
  int step = 0;  // timestep index within the current epoch, 0-based
  LaunchMode mode = LaunchMode::Sync;
  double value = 0.0;  // seconds
};

/// How an epoch splits into async steps followed by a synchronous tail.
struct MeasurementWindow {
  int async_steps = 0;
  int sync_steps = 1;

  int epoch_steps() const { return async_steps + sync_steps; }

  void validate() const {
    if (async_steps < 0) throw ValidationError("window.async_steps must be >= 0");
    if (sync_steps < 1) throw ValidationError("window.sync_steps must be >= 1");
  }

  /// Sync steps are always the last steps of the epoch.
  LaunchMode mode_of_step(int step) const {
    return step < async_steps ? LaunchMode::Async : LaunchMode::Sync;
  }
};

/// Per-epoch sample store, cleared after each balance event.
class LoadDB {
 public:
  explicit LoadDB(int vp_count, MeasurementWindow window)
      : vp_count_(vp_count), window_(window) {}

  int vp_count() const { return vp_count_; }
  const MeasurementWindow& window() const { return window_; }
  const std::vector<StepSample>& samples() const { return samples_; }

  void record(const StepSample& s) {
    if (s.vp < 0 || s.vp >= vp_count_) throw ValidationError("sample vp out of range");
    if (s.step < 0 || s.step >= window_.epoch_steps())
      throw RuntimeFault("sample step outside the current epoch");
    if (s.value < 0) throw ValidationError("sample value must be >= 0");
    if (!seen_.insert({s.vp, s.step}).second)
      throw RuntimeFault("duplicate sample for vp " + std::to_string(s.vp) +
                         " step " + std::to_string(s.step));
    samples_.push_back(s);
  }

  void clear() {
    samples_.clear();
    seen_.clear();
  }

 private:
  int vp_count_ = 0;
  MeasurementWindow window_;
  std::vector<StepSample> samples_;
  std::set<std::pair<VpId, int>> seen_;
};

inline void record_step(LoadDB& db, const StepSample& sample) { db.record(sample); }

/// Per-VP mean over synchronous samples only; async samples never contribute.
inline LoadVector epoch_loads(const LoadDB& db) {
  std::vector<double> sum(db.vp_count(), 0.0);
  std::vector<int> n(db.vp_count(), 0);
  for (const StepSample& s : db.samples()) {
    if (s.mode != LaunchMode::Sync) continue;
    sum[s.vp] += s.value;
    n[s.vp] += 1;
  }
  LoadVector out(db.vp_count(), 0.0);
  for (VpId v = 0; v < db.vp_count(); ++v) {
    if (n[v] == 0)
      throw RuntimeFault("incomplete measurement: vp " + std::to_string(v) +
                         " has no synchronous sample in this epoch");
    out[v] = sum[v] / n[v];
  }
  return out;
}

/// What the host clock sees for an asynchronous launch: the launch overhead,
/// independent of the kernel behind it.
inline StepSample launch_only_sample(VpId vp, int step, const GpuModel& gpu) {
  return {vp, step, LaunchMode::Async, gpu.launch_overhead};
}

}  // namespace overdeck
