#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "overdeck/errors.hpp"
#include "overdeck/workload.hpp"

namespace overdeck {

enum class LaunchMode { Sync, Async };

enum class TransferDirection { HostToDevice, DeviceToHost };

/// Calibrated analytic GPU timing: max(saturation floor, affine in total
/// iterations), plus transfer bandwidths and the async overlap gain.
struct GpuModel {
  double launch_overhead = 1.0e-4;   // s
  double per_item_time = 1.0e-9;     // s per (work item x serial iteration)
  double saturation_floor = 0.0;     // s, minimum nonzero kernel time
  int cores = 2496;
  double h2d_bandwidth = 6.0e9;      // bytes/s
  double d2h_bandwidth = 6.0e9;      // bytes/s
  double async_overlap_gain = 0.06;  // fraction in [0, 1)

  void validate() const {
    if (launch_overhead < 0 || per_item_time < 0 || saturation_floor < 0)
      throw ValidationError("gpu model times must be >= 0");
    if (h2d_bandwidth <= 0 || d2h_bandwidth <= 0)
      throw ValidationError("gpu model bandwidths must be > 0");
    if (async_overlap_gain < 0 || async_overlap_gain >= 1)
      throw ValidationError("gpu model async_overlap_gain must be in [0, 1)");
    if (cores < 1) throw ValidationError("gpu model cores must be >= 1");
  }
};

struct CpuModel {
  double per_item_time = 1.0e-9;  // s per iteration

  void validate() const {
    if (per_item_time <= 0) throw ValidationError("cpu model per_item_time must be > 0");
  }
};

/// Zero work is free; otherwise the floor clamps the affine cost from below.
inline double kernel_time_sync(const KernelWork& work, const GpuModel& gpu) {
  if (work.total() <= 0) return 0.0;
  return std::max(gpu.saturation_floor,
                  gpu.launch_overhead + gpu.per_item_time * work.total());
}

inline double cpu_time(const KernelWork& work, const CpuModel& cpu) {
  return cpu.per_item_time * work.total();
}

inline double transfer_time(double bytes, TransferDirection dir, const GpuModel& gpu) {
  if (bytes < 0) throw ValidationError("transfer bytes must be >= 0");
  if (bytes == 0) return 0.0;
  const double bw =
      dir == TransferDirection::HostToDevice ? gpu.h2d_bandwidth : gpu.d2h_bandwidth;
  return bytes / bw;
}

/// Completion time of a batch of kernels on one node GPU. Sync launches
/// serialize; async launches overlap, bounded below by the longest job.
inline double node_gpu_schedule(const std::vector<double>& jobs, LaunchMode mode,
                                const GpuModel& gpu) {
  double sum = 0.0, mx = 0.0;
  for (double j : jobs) {
    if (j < 0) throw ValidationError("kernel durations must be >= 0");
    sum += j;
    mx = std::max(mx, j);
  }
  if (mode == LaunchMode::Sync || jobs.size() <= 1) return sum;
  return std::max(sum * (1.0 - gpu.async_overlap_gain), mx);
}

struct CalibrationSample {
  KernelWork work;
  double seconds = 0.0;
};

struct GpuCalibration {
  GpuModel model;
  double max_relative_residual = 0.0;
};

namespace detail {

inline double hinge_objective(const std::vector<CalibrationSample>& samples,
                              double launch, double rate, double floor) {
  if (launch < 0 || rate <= 0 || floor < 0) return 1e30;
  double obj = 0.0;
  for (const auto& s : samples) {
    const double pred = std::max(floor, launch + rate * s.work.total());
    const double rel = (pred - s.seconds) / s.seconds;
    obj += rel * rel;
  }
  return obj;
}

// Nelder-Mead on (launch, rate, floor), minimizing squared relative error of
// the full hinge model.
inline std::array<double, 3> refine_hinge_fit(
    const std::vector<CalibrationSample>& samples, std::array<double, 3> start) {
  auto f = [&](const std::array<double, 3>& p) {
    return hinge_objective(samples, p[0], p[1], p[2]);
  };
  std::vector<std::array<double, 3>> simplex;
  simplex.push_back(start);
  for (int i = 0; i < 3; ++i) {
    auto p = start;
    p[i] = p[i] != 0.0 ? p[i] * 1.25 : 1e-6;
    simplex.push_back(p);
  }
  std::vector<double> vals;
  for (auto& p : simplex) vals.push_back(f(p));

  for (int iter = 0; iter < 2000; ++iter) {
    // order ascending
    for (std::size_t i = 0; i < simplex.size(); ++i)
      for (std::size_t j = i + 1; j < simplex.size(); ++j)
        if (vals[j] < vals[i]) {
          std::swap(vals[i], vals[j]);
          std::swap(simplex[i], simplex[j]);
        }
    if (vals[3] - vals[0] < 1e-16 * (1.0 + vals[0])) break;

    std::array<double, 3> centroid{0, 0, 0};
    for (int i = 0; i < 3; ++i)
      for (int d = 0; d < 3; ++d) centroid[d] += simplex[i][d] / 3.0;

    auto blend = [&](double t) {
      std::array<double, 3> p;
      for (int d = 0; d < 3; ++d) p[d] = centroid[d] + t * (centroid[d] - simplex[3][d]);
      return p;
    };
    auto reflect = blend(1.0);
    const double fr = f(reflect);
    if (fr < vals[0]) {
      auto expand = blend(2.0);
      const double fe = f(expand);
      if (fe < fr) { simplex[3] = expand; vals[3] = fe; }
      else { simplex[3] = reflect; vals[3] = fr; }
    } else if (fr < vals[2]) {
      simplex[3] = reflect; vals[3] = fr;
    } else {
      auto contract = blend(fr < vals[3] ? 0.5 : -0.5);
      const double fc = f(contract);
      if (fc < std::min(fr, vals[3])) { simplex[3] = contract; vals[3] = fc; }
      else {
        for (int i = 1; i < 4; ++i) {
          for (int d = 0; d < 3; ++d) simplex[i][d] = 0.5 * (simplex[i][d] + simplex[0][d]);
          vals[i] = f(simplex[i]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < simplex.size(); ++i)
    if (vals[i] < vals[best]) best = i;
  return simplex[best];
}

// Plain least squares y = a + b x.
inline std::pair<double, double> affine_fit(const std::vector<std::pair<double, double>>& xy) {
  const double n = static_cast<double>(xy.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : xy) { sx += x; sy += y; sxx += x * x; sxy += x * y; }
  const double denom = n * sxx - sx * sx;
  if (denom == 0) throw ValidationError("degenerate calibration samples (identical work)");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  return {intercept, slope};
}

}  // namespace detail

/// Two-stage fit: rows near the observed minimum are treated as saturated and
/// set the floor; the rest get a least-squares affine fit. A hinge-model
/// refinement pass then reduces the residual when the data is noisy, and is a
/// no-op on exact synthetic data.
inline GpuCalibration calibrate_gpu(std::vector<CalibrationSample> samples,
                                    const GpuModel& defaults = GpuModel{}) {
  if (samples.size() < 3)
    throw ValidationError("gpu calibration needs >= 3 samples");
  for (const auto& s : samples)
    if (s.seconds <= 0 || s.work.total() <= 0)
      throw ValidationError("gpu calibration samples must have positive work and time");

  const double tmin =
      std::min_element(samples.begin(), samples.end(), [](auto& a, auto& b) {
        return a.seconds < b.seconds;
      })->seconds;

  std::vector<std::pair<double, double>> unsat;
  int saturated = 0;
  for (const auto& s : samples) {
    if (s.seconds <= tmin * 1.10) ++saturated;
    else unsat.emplace_back(s.work.total(), s.seconds);
  }

  double launch = 0.0, rate = 0.0, floor = 0.0;
  if (unsat.size() >= 2) {
    auto [a, b] = detail::affine_fit(unsat);
    launch = std::max(0.0, a);
    rate = b;
    floor = saturated >= 1 ? tmin : 0.0;
  } else {
    // everything in one regime: fit the affine part over all rows
    std::vector<std::pair<double, double>> all;
    for (const auto& s : samples) all.emplace_back(s.work.total(), s.seconds);
    auto [a, b] = detail::affine_fit(all);
    launch = std::max(0.0, a);
    rate = b;
  }
  if (rate <= 0) throw ValidationError("gpu calibration produced a non-positive rate");

  const double before = detail::hinge_objective(samples, launch, rate, floor);
  if (before > 1e-12) {
    auto refined = detail::refine_hinge_fit(samples, {launch, rate, std::max(floor, tmin * 0.5)});
    if (detail::hinge_objective(samples, refined[0], refined[1], refined[2]) < before) {
      launch = refined[0];
      rate = refined[1];
      floor = refined[2];
    }
  }

  GpuModel model = defaults;
  model.launch_overhead = launch;
  model.per_item_time = rate;
  model.saturation_floor = floor;
  model.validate();

  GpuCalibration out{model, 0.0};
  for (const auto& s : samples) {
    const double pred = kernel_time_sync(s.work, model);
    out.max_relative_residual =
        std::max(out.max_relative_residual, std::abs(pred - s.seconds) / s.seconds);
  }
  return out;
}

/// Least squares through the origin; the CPU path is exactly linear.
inline CpuModel calibrate_cpu(const std::vector<CalibrationSample>& samples) {
  if (samples.empty()) throw ValidationError("cpu calibration needs samples");
  double sxx = 0, sxy = 0;
  for (const auto& s : samples) {
    const double x = s.work.total();
    sxx += x * x;
    sxy += x * s.seconds;
  }
  if (sxx == 0) throw ValidationError("degenerate cpu calibration samples");
  CpuModel m{sxy / sxx};
  m.validate();
  return m;
}

/// Bundled probe measurements (1024 x M grid, 2e5-deep serial inner loop) used
/// to calibrate the default probe models.
inline const std::vector<CalibrationSample>& reference_gpu_probe_samples() {
  static const std::vector<CalibrationSample> s = {
      {{1022.0 * 510.0, 2.0e5}, 0.82},
      {{1022.0 * 254.0, 2.0e5}, 0.49},
      {{1022.0 * 126.0, 2.0e5}, 0.33},
      {{1022.0 * 62.0, 2.0e5}, 0.17},
      {{1022.0 * 30.0, 2.0e5}, 0.18},
  };
  return s;
}

inline const std::vector<CalibrationSample>& reference_cpu_probe_samples() {
  static const std::vector<CalibrationSample> s = {
      {{1022.0 * 510.0, 2.0e5}, 54.41},
      {{1022.0 * 254.0, 2.0e5}, 27.1},
      {{1022.0 * 126.0, 2.0e5}, 13.45},
  };
  return s;
}

}  // namespace overdeck
