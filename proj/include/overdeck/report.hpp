#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"
#include "overdeck/cluster.hpp"
#include "overdeck/engine.hpp"

namespace overdeck {

namespace detail {

inline std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline char proc_digit(ProcId p) {
  return p < 10 ? static_cast<char>('0' + p) : static_cast<char>('a' + (p - 10));
}

}  // namespace detail

/// Two lines: per processor one space-separated group, one digit per VP
/// giving its home processor; below it the heavy/light class marks.
inline std::string render_distribution(const Mapping& mapping,
                                       const std::vector<ProcId>& homes,
                                       const std::vector<VpClass>& classes) {
  std::string ids, marks;
  const auto groups = mapping.by_proc();
  for (ProcId p = 0; p < mapping.proc_count(); ++p) {
    if (p > 0) {
      ids += ' ';
      marks += ' ';
    }
    for (VpId v : groups[p]) {
      ids += detail::proc_digit(homes.at(v));
      marks += classes.at(v) == VpClass::Heavy ? 'H' : 'L';
    }
  }
  return ids + "\n" + marks;
}

inline std::string render_distribution(const Mapping& mapping,
                                       const std::vector<VirtualProcess>& vps) {
  std::vector<ProcId> homes;
  std::vector<VpClass> classes;
  for (const auto& vp : vps) {
    homes.push_back(vp.home_proc);
    classes.push_back(vp.class_label);
  }
  return render_distribution(mapping, homes, classes);
}

enum class ReportFormat { Csv, Json };

inline ReportFormat report_format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw ValidationError("unknown report format: " + s);
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg);  // config.hpp

/// Stable-order report; CSV rounds to 2 decimals, JSON keeps full precision.
inline std::string render_report(const Timeline& tl, ReportFormat format) {
  std::vector<ProcId> homes;
  for (int v = 0; v < tl.config.vp_count(); ++v) homes.push_back(-1);
  {
    const Mapping initial =
        initial_block_mapping(tl.config.vp_count(), tl.config.cluster.nodes *
                                                        tl.config.cluster.procs_per_node);
    for (int v = 0; v < tl.config.vp_count(); ++v) homes[v] = initial.proc_of(v);
  }

  if (format == ReportFormat::Csv) {
    std::string out =
        "epoch,steps,step_time_sum_s,migration_count,migration_cost_s,"
        "imbalance_before,imbalance_after,distribution,classes\n";
    for (const EpochRecord& e : tl.epochs) {
      const std::string dist = render_distribution(e.mapping, homes, e.classes);
      const auto nl = dist.find('\n');
      out += std::to_string(e.epoch) + ',' + std::to_string(e.step_times.size()) + ',' +
             detail::fixed2(e.compute_total) + ',' + std::to_string(e.plan.size()) +
             ',' + detail::fixed2(e.migration_cost) + ',' +
             detail::fixed2(e.imbalance_before) + ',' + detail::fixed2(e.imbalance_after) +
             ',' + dist.substr(0, nl) + ',' + dist.substr(nl + 1) + '\n';
    }
    return out;
  }

  nlohmann::json rows = nlohmann::json::array();
  for (const EpochRecord& e : tl.epochs) {
    const std::string dist = render_distribution(e.mapping, homes, e.classes);
    const auto nl = dist.find('\n');
    rows.push_back({{"epoch", e.epoch},
                    {"step_times", e.step_times},
                    {"step_time_sum", e.compute_total},
                    {"migration_count", e.plan.size()},
                    {"migration_cost", e.migration_cost},
                    {"imbalance_before", e.imbalance_before},
                    {"imbalance_after", e.imbalance_after},
                    {"proc_loads", e.proc_loads},
                    {"vp_loads", e.vp_loads},
                    {"plan", plan_to_json(e.plan)},
                    {"distribution", dist.substr(0, nl)},
                    {"classes", dist.substr(nl + 1)}});
  }
  nlohmann::json doc = {{"config", config_to_json(tl.config)}, {"epochs", rows}};
  return doc.dump(2) + "\n";
}

}  // namespace overdeck
