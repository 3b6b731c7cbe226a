#pragma once

#include <fstream>
#include <set>
#include <string>

#include "json.hpp"
#include "overdeck/engine.hpp"
#include "overdeck/presets.hpp"

namespace overdeck {

struct OutputOptions {
  std::string format = "csv";
  std::string directory;
  bool dump_samples = false;
  bool dump_plans = false;
};

struct RunConfig {
  ExperimentConfig experiment;
  OutputOptions output;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& where,
                           const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      throw ValidationError("unknown key \"" + (where.empty() ? it.key() : where + "." + it.key()) + "\" in config");
}

template <typename T>
void maybe(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) {
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(std::string("bad value for \"") + key + "\"");
    }
  }
}

inline Strategy strategy_from_string(const std::string& s) {
  if (s == "greedy") return Strategy::Greedy;
  if (s == "refine_swap") return Strategy::RefineSwap;
  throw ValidationError("unknown strategy: " + s);
}

}  // namespace detail

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  return {
      {"cluster",
       {{"nodes", c.cluster.nodes},
        {"procs_per_node", c.cluster.procs_per_node},
        {"gpus_per_node", c.cluster.gpus_per_node},
        {"network_bandwidth", c.cluster.network_bandwidth},
        {"network_latency", c.cluster.network_latency}}},
      {"domain",
       {{"nx", c.domain.nx}, {"ny", c.domain.ny}, {"nz", c.domain.nz},
        {"fields", c.domain.fields}}},
      {"decomposition",
       {{"kind", c.decomposition.kind == DecompositionKind::OneD ? "1d" : "2d"},
        {"kx", c.decomposition.kx},
        {"ky", c.decomposition.ky}}},
      {"window",
       {{"async_steps", c.window.async_steps}, {"sync_steps", c.window.sync_steps}}},
      {"epochs", c.epochs},
      {"load",
       {{"pattern", to_string(c.pattern)},
        {"heavy_value", c.heavy_value},
        {"light_value", c.light_value},
        {"advection",
         {{"total_shift_rows", c.advection.total_shift_rows},
          {"epoch", c.advection.epoch},
          {"duration_steps", c.advection.duration_steps}}}}},
      {"policy",
       {{"first_call_strategy", to_string(c.policy.first_call_strategy)},
        {"later_call_strategy", to_string(c.policy.later_call_strategy)},
        {"trigger_threshold", c.policy.trigger_threshold},
        {"refine_tolerance", c.policy.refine_tolerance}}},
      {"gpu_model",
       {{"launch_overhead", c.gpu.launch_overhead},
        {"per_item_time", c.gpu.per_item_time},
        {"saturation_floor", c.gpu.saturation_floor},
        {"cores", c.gpu.cores},
        {"h2d_bandwidth", c.gpu.h2d_bandwidth},
        {"d2h_bandwidth", c.gpu.d2h_bandwidth},
        {"async_overlap_gain", c.gpu.async_overlap_gain}}},
      {"cpu_model", {{"per_item_time", c.cpu.per_item_time}}},
      {"physics_cost_scale", c.physics_cost_scale},
      {"measurement_noise_sigma", c.measurement_noise_sigma},
      {"seed", c.seed},
  };
}

inline ExperimentConfig config_from_json(const nlohmann::json& doc) {
  using detail::maybe;
  using detail::reject_unknown;

  ExperimentConfig c;
  if (doc.contains("preset")) c = preset(doc.at("preset").get<std::string>());

  reject_unknown(doc, "", {"preset", "cluster", "domain", "decomposition", "window",
                           "epochs", "load", "policy", "gpu_model", "cpu_model",
                           "physics_cost_scale", "measurement_noise_sigma", "seed",
                           "output"});

  if (doc.contains("cluster")) {
    const auto& o = doc.at("cluster");
    reject_unknown(o, "cluster", {"nodes", "procs_per_node", "gpus_per_node",
                                  "network_bandwidth", "network_latency"});
    maybe(o, "nodes", c.cluster.nodes);
    maybe(o, "procs_per_node", c.cluster.procs_per_node);
    maybe(o, "gpus_per_node", c.cluster.gpus_per_node);
    maybe(o, "network_bandwidth", c.cluster.network_bandwidth);
    maybe(o, "network_latency", c.cluster.network_latency);
  }
  if (doc.contains("domain")) {
    const auto& o = doc.at("domain");
    reject_unknown(o, "domain", {"nx", "ny", "nz", "fields"});
    maybe(o, "nx", c.domain.nx);
    maybe(o, "ny", c.domain.ny);
    maybe(o, "nz", c.domain.nz);
    maybe(o, "fields", c.domain.fields);
  }
  if (doc.contains("decomposition")) {
    const auto& o = doc.at("decomposition");
    reject_unknown(o, "decomposition", {"kind", "kx", "ky"});
    if (o.contains("kind")) {
      const auto kind = o.at("kind").get<std::string>();
      if (kind == "1d") c.decomposition.kind = DecompositionKind::OneD;
      else if (kind == "2d") c.decomposition.kind = DecompositionKind::TwoD;
      else throw ValidationError("decomposition.kind must be \"1d\" or \"2d\"");
    }
    maybe(o, "kx", c.decomposition.kx);
    maybe(o, "ky", c.decomposition.ky);
  }
  if (doc.contains("window")) {
    const auto& o = doc.at("window");
    reject_unknown(o, "window", {"async_steps", "sync_steps"});
    maybe(o, "async_steps", c.window.async_steps);
    maybe(o, "sync_steps", c.window.sync_steps);
  }
  if (doc.contains("epochs")) {
    const auto e = doc.at("epochs");
    if (!e.is_number_integer() || e.get<int>() < 1)
      throw ValidationError("\"epochs\" must be a positive integer");
    c.epochs = e.get<int>();
  }
  if (doc.contains("load")) {
    const auto& o = doc.at("load");
    reject_unknown(o, "load", {"pattern", "heavy_value", "light_value", "advection"});
    if (o.contains("pattern"))
      c.pattern = load_pattern_from_string(o.at("pattern").get<std::string>());
    maybe(o, "heavy_value", c.heavy_value);
    maybe(o, "light_value", c.light_value);
    if (o.contains("advection")) {
      const auto& a = o.at("advection");
      reject_unknown(a, "load.advection", {"total_shift_rows", "epoch", "duration_steps"});
      maybe(a, "total_shift_rows", c.advection.total_shift_rows);
      maybe(a, "epoch", c.advection.epoch);
      maybe(a, "duration_steps", c.advection.duration_steps);
    }
  }
  if (doc.contains("policy")) {
    const auto& o = doc.at("policy");
    reject_unknown(o, "policy", {"first_call_strategy", "later_call_strategy",
                                 "trigger_threshold", "refine_tolerance"});
    if (o.contains("first_call_strategy"))
      c.policy.first_call_strategy =
          detail::strategy_from_string(o.at("first_call_strategy").get<std::string>());
    if (o.contains("later_call_strategy"))
      c.policy.later_call_strategy =
          detail::strategy_from_string(o.at("later_call_strategy").get<std::string>());
    maybe(o, "trigger_threshold", c.policy.trigger_threshold);
    maybe(o, "refine_tolerance", c.policy.refine_tolerance);
  }
  if (doc.contains("gpu_model")) {
    const auto& o = doc.at("gpu_model");
    reject_unknown(o, "gpu_model", {"launch_overhead", "per_item_time", "saturation_floor",
                                    "cores", "h2d_bandwidth", "d2h_bandwidth",
                                    "async_overlap_gain"});
    maybe(o, "launch_overhead", c.gpu.launch_overhead);
    maybe(o, "per_item_time", c.gpu.per_item_time);
    maybe(o, "saturation_floor", c.gpu.saturation_floor);
    maybe(o, "cores", c.gpu.cores);
    maybe(o, "h2d_bandwidth", c.gpu.h2d_bandwidth);
    maybe(o, "d2h_bandwidth", c.gpu.d2h_bandwidth);
    maybe(o, "async_overlap_gain", c.gpu.async_overlap_gain);
  }
  if (doc.contains("cpu_model")) {
    const auto& o = doc.at("cpu_model");
    reject_unknown(o, "cpu_model", {"per_item_time"});
    maybe(o, "per_item_time", c.cpu.per_item_time);
  }
  maybe(doc, "physics_cost_scale", c.physics_cost_scale);
  maybe(doc, "measurement_noise_sigma", c.measurement_noise_sigma);
  maybe(doc, "seed", c.seed);

  c.validate();
  return c;
}

inline RunConfig run_config_from_json(const nlohmann::json& doc) {
  RunConfig rc;
  rc.experiment = config_from_json(doc);
  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    detail::reject_unknown(o, "output", {"format", "directory", "dump_samples",
                                         "dump_plans"});
    detail::maybe(o, "format", rc.output.format);
    detail::maybe(o, "directory", rc.output.directory);
    detail::maybe(o, "dump_samples", rc.output.dump_samples);
    detail::maybe(o, "dump_plans", rc.output.dump_plans);
    if (rc.output.format != "csv" && rc.output.format != "json")
      throw ValidationError("output.format must be \"csv\" or \"json\"");
  }
  return rc;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  return run_config_from_json(doc);
}

}  // namespace overdeck
