#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "overdeck/errors.hpp"

namespace overdeck {

using VpId = int;
using ProcId = int;
using NodeId = int;

/// Physical cluster description. One GPU per node.
struct ClusterSpec {
  int nodes = 1;
  int procs_per_node = 1;
  int gpus_per_node = 1;
  double network_bandwidth = 5.0e9;  // bytes/s
  double network_latency = 1.0e-5;   // s

  void validate() const {
    if (nodes < 1) throw ValidationError("cluster.nodes must be >= 1");
    if (procs_per_node < 1) throw ValidationError("cluster.procs_per_node must be >= 1");
    if (gpus_per_node != 1) throw ValidationError("cluster.gpus_per_node must be 1");
    if (network_bandwidth <= 0) throw ValidationError("cluster.network_bandwidth must be > 0");
    if (network_latency < 0) throw ValidationError("cluster.network_latency must be >= 0");
  }
};

struct ClusterState {
  ClusterSpec spec;

  int proc_count() const { return spec.nodes * spec.procs_per_node; }
  int node_count() const { return spec.nodes; }
  NodeId node_of(ProcId p) const { return p / spec.procs_per_node; }
};

inline ClusterState build_cluster(const ClusterSpec& spec) {
  spec.validate();
  return ClusterState{spec};
}

enum class VpClass { Heavy, Light };

/// A migratable unit: one sub-domain plus its data footprint.
/// class_label is derived from the current load field, reporting only.
struct VirtualProcess {
  VpId id = 0;
  ProcId home_proc = 0;
  int subdomain = 0;  // index into the decomposition, equals id for presets
  std::int64_t data_bytes = 0;
  VpClass class_label = VpClass::Light;
};

/// Per-VP measured load, seconds. Length K.
using LoadVector = std::vector<double>;

struct Move {
  VpId vp = 0;
  ProcId from = 0;
  ProcId to = 0;
  bool operator==(const Move&) const = default;
};

enum class Strategy { Greedy, RefineSwap };

inline std::string to_string(Strategy s) {
  return s == Strategy::Greedy ? "greedy" : "refine_swap";
}

/// Ordered list of migrations. A swap shows up as two moves.
struct MigrationPlan {
  std::vector<Move> moves;
  Strategy strategy = Strategy::Greedy;

  bool empty() const { return moves.empty(); }
  std::size_t size() const { return moves.size(); }
};

/// Total VP -> processor assignment.
class Mapping {
 public:
  Mapping() = default;
  Mapping(int vp_count, int proc_count)
      : assignment_(vp_count, 0), proc_count_(proc_count) {}

  int vp_count() const { return static_cast<int>(assignment_.size()); }
  int proc_count() const { return proc_count_; }

  ProcId proc_of(VpId v) const { return assignment_.at(v); }
  void assign(VpId v, ProcId p) {
    if (p < 0 || p >= proc_count_) throw ValidationError("processor id out of range");
    assignment_.at(v) = p;
  }

  std::vector<std::vector<VpId>> by_proc() const {
    std::vector<std::vector<VpId>> out(proc_count_);
    for (VpId v = 0; v < vp_count(); ++v) out[assignment_[v]].push_back(v);
    return out;
  }

  bool operator==(const Mapping&) const = default;

 private:
  std::vector<ProcId> assignment_;
  int proc_count_ = 0;
};

/// Contiguous blocks, VP v -> v / (K/P); remainder spread one-per-proc from
/// processor 0 upward.
inline Mapping initial_block_mapping(int vp_count, int proc_count) {
  if (proc_count < 1) throw ValidationError("proc count must be >= 1");
  if (vp_count < proc_count) throw ValidationError("vp count must be >= proc count");
  Mapping m(vp_count, proc_count);
  const int base = vp_count / proc_count;
  const int rem = vp_count % proc_count;
  VpId v = 0;
  for (ProcId p = 0; p < proc_count; ++p) {
    const int block = base + (p < rem ? 1 : 0);
    for (int i = 0; i < block; ++i) m.assign(v++, p);
  }
  return m;
}

/// Applies every move; rejects the whole plan on any stale from-processor.
inline Mapping apply_plan(const Mapping& mapping, const MigrationPlan& plan) {
  Mapping out = mapping;
  for (const Move& mv : plan.moves) {
    if (out.proc_of(mv.vp) != mv.from)
      throw RuntimeFault("stale move: vp " + std::to_string(mv.vp) +
                         " is not on processor " + std::to_string(mv.from));
    out.assign(mv.vp, mv.to);
  }
  return out;
}

/// L_p = sum of loads of the VPs assigned to p.
inline std::vector<double> proc_loads(const LoadVector& loads, const Mapping& mapping) {
  if (static_cast<int>(loads.size()) != mapping.vp_count())
    throw ValidationError("load vector length does not match vp count");
  std::vector<double> totals(mapping.proc_count(), 0.0);
  for (VpId v = 0; v < mapping.vp_count(); ++v) totals[mapping.proc_of(v)] += loads[v];
  return totals;
}

/// max/mean over processors; 1 for the degenerate all-zero case.
inline double imbalance_ratio(const std::vector<double>& proc_totals) {
  if (proc_totals.empty()) throw ValidationError("no processor totals");
  const double sum = std::accumulate(proc_totals.begin(), proc_totals.end(), 0.0);
  if (sum <= 0.0) return 1.0;
  const double mx = *std::max_element(proc_totals.begin(), proc_totals.end());
  return mx / (sum / static_cast<double>(proc_totals.size()));
}

}  // namespace overdeck
