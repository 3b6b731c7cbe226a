#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "json.hpp"
#include "overdeck/cluster.hpp"
#include "overdeck/gpu_cost.hpp"

namespace overdeck {

/// First triggered balance is aggressive, later ones conservative.
struct BalancePolicy {
  Strategy first_call_strategy = Strategy::Greedy;
  Strategy later_call_strategy = Strategy::RefineSwap;
  double trigger_threshold = 1.0;  // imbalance ratio; 1.0 balances always
  double refine_tolerance = 0.02;  // fraction of the average load

  void validate() const {
    if (trigger_threshold < 1.0)
      throw ValidationError("policy.trigger_threshold must be >= 1");
    if (refine_tolerance < 0.0)
      throw ValidationError("policy.refine_tolerance must be >= 0");
  }
};

inline bool should_balance(const std::vector<double>& proc_totals,
                           const BalancePolicy& policy) {
  return imbalance_ratio(proc_totals) > policy.trigger_threshold;
}

/// Reassigns every object from scratch: heaviest first, each to the currently
/// least loaded processor. Ties break on lower VP id and lower processor id.
inline MigrationPlan greedy_lb(const LoadVector& loads, const Mapping& mapping) {
  const int K = mapping.vp_count();
  const int P = mapping.proc_count();
  if (static_cast<int>(loads.size()) != K)
    throw ValidationError("greedy_lb: load vector length mismatch");

  std::vector<VpId> order(K);
  for (VpId v = 0; v < K; ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(),
                   [&](VpId a, VpId b) { return loads[a] > loads[b]; });

  std::vector<double> acc(P, 0.0);
  Mapping target(K, P);
  for (VpId v : order) {
    ProcId best = 0;
    for (ProcId p = 1; p < P; ++p)
      if (acc[p] < acc[best]) best = p;
    target.assign(v, best);
    acc[best] += loads[v];
  }

  MigrationPlan plan;
  plan.strategy = Strategy::Greedy;
  for (VpId v = 0; v < K; ++v)
    if (target.proc_of(v) != mapping.proc_of(v))
      plan.moves.push_back({v, mapping.proc_of(v), target.proc_of(v)});
  return plan;
}

/// Moves (or pairwise swaps) objects off the most overloaded processor until
/// every processor sits within tolerance of the average or nothing improves.
/// A swap records two moves. The max processor load never increases.
inline MigrationPlan refine_swap_lb(const LoadVector& loads, const Mapping& mapping,
                                    double tolerance = 0.02) {
  const int K = mapping.vp_count();
  const int P = mapping.proc_count();
  if (static_cast<int>(loads.size()) != K)
    throw ValidationError("refine_swap_lb: load vector length mismatch");
  if (tolerance < 0) throw ValidationError("refine_swap_lb: tolerance must be >= 0");

  Mapping cur = mapping;
  std::vector<double> acc = proc_loads(loads, cur);
  const double total = std::accumulate(acc.begin(), acc.end(), 0.0);
  const double avg = total / P;
  const double threshold = avg * (1.0 + tolerance);

  MigrationPlan plan;
  plan.strategy = Strategy::RefineSwap;

  auto vps_on = [&](ProcId p) {
    std::vector<VpId> out;
    for (VpId v = 0; v < K; ++v)
      if (cur.proc_of(v) == p) out.push_back(v);
    return out;
  };

  for (int round = 0; round < K * P; ++round) {
    ProcId over = -1;
    for (ProcId p = 0; p < P; ++p)
      if (acc[p] > threshold && (over < 0 || acc[p] > acc[over])) over = p;
    if (over < 0) break;
    const double over_dev = acc[over] - avg;

    // best single migration to an underloaded processor
    struct Single { VpId vp; ProcId to; double score; };
    std::optional<Single> best_single;
    for (VpId v : vps_on(over)) {
      for (ProcId q = 0; q < P; ++q) {
        if (q == over || acc[q] >= avg) continue;
        const double src = acc[over] - loads[v];
        const double dst = acc[q] + loads[v];
        if (std::abs(src - avg) >= over_dev) continue;  // must improve the source
        if (dst > threshold) continue;                  // must not overshoot the receiver
        const double score = std::max(std::abs(src - avg), std::abs(dst - avg));
        if (!best_single || score < best_single->score)
          best_single = Single{v, q, score};
      }
    }
    if (best_single) {
      plan.moves.push_back({best_single->vp, over, best_single->to});
      acc[over] -= loads[best_single->vp];
      acc[best_single->to] += loads[best_single->vp];
      cur.assign(best_single->vp, best_single->to);
      continue;
    }

    // otherwise the best swap: one object each way with an underloaded proc
    struct Swap { VpId give, take; ProcId with; double score; };
    std::optional<Swap> best_swap;
    for (ProcId q = 0; q < P; ++q) {
      if (q == over || acc[q] >= avg) continue;
      for (VpId a : vps_on(over)) {
        for (VpId b : vps_on(q)) {
          const double delta = loads[a] - loads[b];
          if (delta <= 0) continue;
          const double src = acc[over] - delta;
          const double dst = acc[q] + delta;
          if (std::abs(src - avg) >= over_dev) continue;
          if (dst > threshold) continue;
          const double score = std::max(std::abs(src - avg), std::abs(dst - avg));
          if (!best_swap || score < best_swap->score)
            best_swap = Swap{a, b, q, score};
        }
      }
    }
    if (!best_swap) break;  // no improving action for the worst processor

    plan.moves.push_back({best_swap->give, over, best_swap->with});
    plan.moves.push_back({best_swap->take, best_swap->with, over});
    const double delta = loads[best_swap->give] - loads[best_swap->take];
    acc[over] -= delta;
    acc[best_swap->with] += delta;
    cur.assign(best_swap->give, best_swap->with);
    cur.assign(best_swap->take, over);
  }
  return plan;
}

/// Transfer cost of a plan: per moved VP a device-to-host stage on the source
/// node, a network hop when nodes differ, and a host-to-device stage on the
/// destination. Nodes work in parallel, each node's transfers serialize.
inline double plan_cost(const MigrationPlan& plan, const std::vector<VirtualProcess>& vps,
                        const ClusterState& cluster, const GpuModel& gpu) {
  std::vector<double> node_cost(cluster.node_count(), 0.0);
  for (const Move& mv : plan.moves) {
    const auto bytes = static_cast<double>(vps.at(mv.vp).data_bytes);
    const NodeId from_node = cluster.node_of(mv.from);
    const NodeId to_node = cluster.node_of(mv.to);
    node_cost[from_node] += transfer_time(bytes, TransferDirection::DeviceToHost, gpu);
    node_cost[to_node] += transfer_time(bytes, TransferDirection::HostToDevice, gpu);
    if (from_node != to_node) {
      const double net =
          bytes / cluster.spec.network_bandwidth + cluster.spec.network_latency;
      node_cost[from_node] += net;
      node_cost[to_node] += net;
    }
  }
  return node_cost.empty() ? 0.0
                           : *std::max_element(node_cost.begin(), node_cost.end());
}

inline nlohmann::json plan_to_json(const MigrationPlan& plan) {
  nlohmann::json moves = nlohmann::json::array();
  for (const Move& m : plan.moves)
    moves.push_back({{"vp", m.vp}, {"from", m.from}, {"to", m.to}});
  return {{"strategy", to_string(plan.strategy)}, {"moves", moves}};
}

}  // namespace overdeck
