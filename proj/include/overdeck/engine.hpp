#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "overdeck/balancer.hpp"
#include "overdeck/cluster.hpp"
#include "overdeck/errors.hpp"
#include "overdeck/gpu_cost.hpp"
#include "overdeck/measurement.hpp"
#include "overdeck/workload.hpp"

namespace overdeck {

enum class DecompositionKind { OneD, TwoD };

struct Decomposition {
  DecompositionKind kind = DecompositionKind::OneD;
  int kx = 1;  // tiles along X (2d only)
  int ky = 1;  // tiles along Y (strip count for 1d)

  int vp_count() const { return kx * ky; }
};

/// Load motion: the heavy band advances by total_shift_rows during the given
/// epoch, spread over its first duration_steps timesteps. duration_steps = 1
/// reproduces a single jump at the epoch start.
struct AdvectionSchedule {
  int total_shift_rows = 0;
  int epoch = 0;  // 1-based; 0 disables advection
  int duration_steps = 1;

  void validate() const {
    if (total_shift_rows < 0) throw ValidationError("advection.total_shift_rows must be >= 0");
    if (epoch < 0) throw ValidationError("advection.epoch must be >= 0");
    if (duration_steps < 1) throw ValidationError("advection.duration_steps must be >= 1");
  }
};

struct ExperimentConfig {
  ClusterSpec cluster;
  Domain domain;
  Decomposition decomposition;
  MeasurementWindow window{6, 4};
  int epochs = 1;
  LoadPattern pattern = LoadPattern::Uniform;
  double heavy_value = 2.0;
  double light_value = 1.0;
  AdvectionSchedule advection;
  BalancePolicy policy;
  GpuModel gpu;
  CpuModel cpu;
  double physics_cost_scale = 1.0;   // physics iteration cost relative to a stencil item
  double measurement_noise_sigma = 0.0;
  std::uint64_t seed = 1;

  int vp_count() const { return decomposition.vp_count(); }

  void validate() const {
    cluster.validate();
    domain.validate();
    window.validate();
    advection.validate();
    policy.validate();
    gpu.validate();
    cpu.validate();
    if (epochs < 1) throw ValidationError("epochs must be >= 1");
    if (decomposition.kx < 1 || decomposition.ky < 1)
      throw ValidationError("decomposition counts must be >= 1");
    if (decomposition.kind == DecompositionKind::OneD && decomposition.kx != 1)
      throw ValidationError("1d decomposition requires kx = 1");
    const int P = cluster.nodes * cluster.procs_per_node;
    if (vp_count() < P) throw ValidationError("vp count must be >= processor count");
    if (physics_cost_scale <= 0) throw ValidationError("physics_cost_scale must be > 0");
    if (measurement_noise_sigma < 0)
      throw ValidationError("measurement_noise_sigma must be >= 0");
    if (heavy_value < light_value || light_value < 1)
      throw ValidationError("load values require heavy >= light >= 1");
  }
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  std::vector<double> step_times;
  double compute_total = 0.0;  // sum of step times, migration excluded
  MigrationPlan plan;
  double migration_cost = 0.0;  // plan transfers + full-footprint staging
  double imbalance_before = 1.0;
  double imbalance_after = 1.0;
  std::vector<double> proc_loads;
  LoadVector vp_loads;
  Mapping mapping;  // active during this epoch
  std::vector<VpClass> classes;
};

struct Timeline {
  ExperimentConfig config;
  std::vector<EpochRecord> epochs;
};

struct ProbeRow {
  int m = 0;
  double cpu_seconds = 0.0;
  double gpu_seconds = 0.0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic per-(vp, step) factor in [1 - sigma, 1 + sigma]; keyed by
/// identity, not draw order, so it is invariant under mapping permutations.
inline double noise_factor(std::uint64_t seed, VpId vp, int global_step, double sigma) {
  if (sigma == 0.0) return 1.0;
  const std::uint64_t h =
      splitmix64(seed ^ splitmix64(0x5151ULL * vp + 0x9d0fULL) ^
                 splitmix64(0xabcdULL + 0x51ULL * global_step));
  const double u = 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
  return 1.0 + sigma * u;
}

}  // namespace detail

/// Deterministic simulator of the timestep/migration loop.
class Engine {
 public:
  explicit Engine(ExperimentConfig config) : cfg_(std::move(config)) {
    cfg_.validate();
    cluster_ = build_cluster(cfg_.cluster);
    subs_ = cfg_.decomposition.kind == DecompositionKind::OneD
                ? decompose_1d(cfg_.domain, cfg_.decomposition.ky)
                : decompose_2d(cfg_.domain, cfg_.decomposition.kx, cfg_.decomposition.ky);
    mapping_ = initial_block_mapping(vp_count(), cluster_.proc_count());
    vps_.resize(vp_count());
    for (VpId v = 0; v < vp_count(); ++v) {
      vps_[v].id = v;
      vps_[v].home_proc = mapping_.proc_of(v);
      vps_[v].subdomain = v;
      vps_[v].data_bytes = subdomain_bytes(subs_[v], cfg_.domain.nz, cfg_.domain.fields);
    }
    build_neighbors();

    std::vector<SubDomain> node0_subs;
    for (VpId v = 0; v < vp_count(); ++v)
      if (cluster_.node_of(mapping_.proc_of(v)) == 0) node0_subs.push_back(subs_[v]);
    base_field_ = init_load_field(cfg_.domain, cfg_.pattern, cfg_.heavy_value,
                                  cfg_.light_value, node0_subs);
    set_shift(0);
  }

  int vp_count() const { return cfg_.vp_count(); }
  const ExperimentConfig& config() const { return cfg_; }
  const ClusterState& cluster() const { return cluster_; }
  const std::vector<SubDomain>& subdomains() const { return subs_; }
  const std::vector<VirtualProcess>& vps() const { return vps_; }
  const Mapping& mapping() const { return mapping_; }
  const LoadField& load_field() const { return field_; }

  /// Kernel time of one VP for one timestep: boundary + Jacobi + physics.
  double vp_kernel_time(VpId v) const {
    const SubDomain& sub = subs_[v];
    const double jacobi =
        kernel_time_sync(jacobi_work(sub, cfg_.domain.nz, cfg_.domain.fields), cfg_.gpu);
    const KernelWork bnd{static_cast<double>(sub.boundary_cells) * cfg_.domain.nz *
                             cfg_.domain.fields,
                         sub.boundary_cells > 0 ? 1.0 : 0.0};
    const double boundary = kernel_time_sync(bnd, cfg_.gpu);
    KernelWork phys = physics_work(sub, field_, cfg_.domain.nz);
    phys.work_items *= cfg_.physics_cost_scale;
    const double physics = kernel_time_sync(phys, cfg_.gpu);
    return boundary + jacobi + physics;
  }

  /// One bulk-synchronous timestep. Returns the wall time and per-VP samples.
  std::pair<double, std::vector<StepSample>> step_time(LaunchMode mode, int epoch_step,
                                                       int global_step) const {
    const int P = cluster_.proc_count();
    std::vector<double> kernels(vp_count());
    for (VpId v = 0; v < vp_count(); ++v) kernels[v] = vp_kernel_time(v);

    std::vector<std::vector<double>> node_jobs(cluster_.node_count());
    for (VpId v = 0; v < vp_count(); ++v)
      node_jobs[cluster_.node_of(mapping_.proc_of(v))].push_back(kernels[v]);
    std::vector<double> node_time(cluster_.node_count());
    for (NodeId n = 0; n < cluster_.node_count(); ++n)
      node_time[n] = node_gpu_schedule(node_jobs[n], mode, cfg_.gpu);

    double wall = 0.0;
    for (ProcId p = 0; p < P; ++p) {
      const NodeId n = cluster_.node_of(p);
      double halo_tr = 0.0, comm_bytes = 0.0;
      int remote_faces = 0;
      for (VpId v = 0; v < vp_count(); ++v) {
        if (mapping_.proc_of(v) != p) continue;
        const double hbytes = static_cast<double>(
            halo_bytes(subs_[v], cfg_.domain.nz, cfg_.domain.fields));
        halo_tr += transfer_time(hbytes, TransferDirection::DeviceToHost, cfg_.gpu) +
                   transfer_time(hbytes, TransferDirection::HostToDevice, cfg_.gpu);
        for (const auto& [nbr, face_cells] : neighbors_[v]) {
          if (mapping_.proc_of(nbr) == p) continue;
          comm_bytes += static_cast<double>(face_cells) * cfg_.domain.nz *
                        cfg_.domain.fields * kBytesPerValue;
          ++remote_faces;
        }
      }
      const double comm = comm_bytes / cluster_.spec.network_bandwidth +
                          remote_faces * cluster_.spec.network_latency;
      // non-blocking halo messages overlap the kernels; only the excess shows
      const double t = node_time[n] + halo_tr + std::max(0.0, comm - node_time[n]);
      wall = std::max(wall, t);
    }

    std::vector<StepSample> samples;
    samples.reserve(vp_count());
    for (VpId v = 0; v < vp_count(); ++v) {
      if (mode == LaunchMode::Sync) {
        const double noisy = kernels[v] * detail::noise_factor(cfg_.seed, v, global_step,
                                                               cfg_.measurement_noise_sigma);
        samples.push_back({v, epoch_step, LaunchMode::Sync, noisy});
      } else {
        samples.push_back(launch_only_sample(v, epoch_step, cfg_.gpu));
      }
    }
    return {wall, samples};
  }

  EpochRecord run_epoch(int epoch_index) {
    EpochRecord rec;
    rec.epoch = epoch_index;
    rec.mapping = mapping_;
    rec.classes = classify_vps();

    LoadDB db(vp_count(), cfg_.window);
    for (int s = 0; s < cfg_.window.epoch_steps(); ++s) {
      advance_advection(epoch_index, s);
      const LaunchMode mode = cfg_.window.mode_of_step(s);
      auto [wall, samples] = step_time(mode, s, global_step_);
      rec.step_times.push_back(wall);
      rec.compute_total += wall;
      for (const StepSample& smp : samples) record_step(db, smp);
      ++global_step_;
    }

    rec.vp_loads = epoch_loads(db);
    rec.proc_loads = proc_loads(rec.vp_loads, mapping_);
    rec.imbalance_before = imbalance_ratio(rec.proc_loads);
    rec.imbalance_after = rec.imbalance_before;

    if (epoch_index < cfg_.epochs && should_balance(rec.proc_loads, cfg_.policy)) {
      const Strategy strategy = balance_calls_ == 0 ? cfg_.policy.first_call_strategy
                                                    : cfg_.policy.later_call_strategy;
      rec.plan = strategy == Strategy::Greedy
                     ? greedy_lb(rec.vp_loads, mapping_)
                     : refine_swap_lb(rec.vp_loads, mapping_, cfg_.policy.refine_tolerance);
      ++balance_calls_;
      if (!rec.plan.empty()) {
        rec.migration_cost =
            plan_cost(rec.plan, vps_, cluster_, cfg_.gpu) + full_transfer_cost();
        mapping_ = apply_plan(mapping_, rec.plan);
        rec.imbalance_after = imbalance_ratio(proc_loads(rec.vp_loads, mapping_));
      }
    }
    return rec;
  }

  Timeline run() {
    Timeline tl;
    tl.config = cfg_;
    for (int e = 1; e <= cfg_.epochs; ++e) tl.epochs.push_back(run_epoch(e));
    return tl;
  }

  std::vector<VpClass> classify_vps() const {
    const double mid = 0.5 * (cfg_.heavy_value + cfg_.light_value);
    std::vector<VpClass> out(vp_count());
    for (VpId v = 0; v < vp_count(); ++v)
      out[v] = field_.mean_over(subs_[v]) > mid ? VpClass::Heavy : VpClass::Light;
    return out;
  }

 private:
  void build_neighbors() {
    neighbors_.assign(vp_count(), {});
    const int kx = cfg_.decomposition.kx;
    const int ky = cfg_.decomposition.ky;
    auto add = [&](VpId a, VpId b, std::int64_t cells) {
      neighbors_[a].emplace_back(b, cells);
    };
    for (int iy = 0; iy < ky; ++iy) {
      for (int ix = 0; ix < kx; ++ix) {
        const VpId v = iy * kx + ix;
        const SubDomain& s = subs_[v];
        const std::int64_t w = s.x_end - s.x_begin;
        const std::int64_t h = s.y_end - s.y_begin;
        if (ix > 0) add(v, v - 1, h);
        if (ix + 1 < kx) add(v, v + 1, h);
        if (iy > 0) add(v, v - kx, w);
        if (iy + 1 < ky) add(v, v + kx, w);
      }
    }
  }

  // Full-footprint staging around a migration event, per node in parallel.
  double full_transfer_cost() const {
    std::vector<double> node_cost(cluster_.node_count(), 0.0);
    for (VpId v = 0; v < vp_count(); ++v) {
      const auto bytes = static_cast<double>(vps_[v].data_bytes);
      node_cost[cluster_.node_of(mapping_.proc_of(v))] +=
          transfer_time(bytes, TransferDirection::DeviceToHost, cfg_.gpu) +
          transfer_time(bytes, TransferDirection::HostToDevice, cfg_.gpu);
    }
    return *std::max_element(node_cost.begin(), node_cost.end());
  }

  void advance_advection(int epoch_index, int step) {
    const AdvectionSchedule& adv = cfg_.advection;
    if (adv.epoch == 0 || adv.total_shift_rows == 0) return;
    int target = shift_rows_;
    if (epoch_index > adv.epoch) {
      target = adv.total_shift_rows;
    } else if (epoch_index == adv.epoch) {
      const int k = std::min(step + 1, adv.duration_steps);
      target = static_cast<int>(std::lround(
          static_cast<double>(adv.total_shift_rows) * k / adv.duration_steps));
    }
    if (target != shift_rows_) set_shift(target);
  }

  void set_shift(int rows) {
    shift_rows_ = rows;
    field_ = advect_load_field(base_field_, rows % cfg_.domain.ny);
    const auto classes = classify_vps();
    for (VpId v = 0; v < vp_count(); ++v) vps_[v].class_label = classes[v];
  }

  ExperimentConfig cfg_;
  ClusterState cluster_;
  std::vector<SubDomain> subs_;
  std::vector<VirtualProcess> vps_;
  std::vector<std::vector<std::pair<VpId, std::int64_t>>> neighbors_;
  Mapping mapping_;
  LoadField base_field_;
  LoadField field_;
  int shift_rows_ = 0;
  int global_step_ = 0;
  int balance_calls_ = 0;
};

inline Timeline run_experiment(const ExperimentConfig& config) {
  Engine engine(config);
  return engine.run();
}

/// CPU and GPU timings of the probe kernel family over a list of M values.
inline std::vector<ProbeRow> scaling_probe(int n, const std::vector<int>& m_list,
                                           double inner, const GpuModel& gpu,
                                           const CpuModel& cpu) {
  if (m_list.empty()) throw ValidationError("scaling probe needs at least one M");
  std::vector<ProbeRow> rows;
  for (int m : m_list) {
    const KernelWork work{static_cast<double>(n - 2) * (m - 2), inner};
    rows.push_back({m, cpu_time(work, cpu), kernel_time_sync(work, gpu)});
  }
  return rows;
}

}  // namespace overdeck
