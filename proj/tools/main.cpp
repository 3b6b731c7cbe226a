// Command-line front end: run experiments, fit cost models, print probe tables.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "overdeck/config.hpp"
#include "overdeck/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::optional<std::uint64_t> seed_from_env() {
  const char* s = std::getenv("OVERDECK_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw overdeck::ValidationError("OVERDECK_SEED is not a valid integer");
  }
}

void write_or_print(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw overdeck::RuntimeFault("cannot write output file: " + out_path);
  out << text;
}

std::vector<overdeck::CalibrationSample> read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw overdeck::ValidationError("cannot open samples file: " + path);
  std::vector<overdeck::CalibrationSample> samples;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.find("work_items") != std::string::npos) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
      throw overdeck::ValidationError("samples line " + std::to_string(lineno) +
                                      ": expected work_items,serial_depth,seconds");
    try {
      samples.push_back({{std::stod(a), std::stod(b)}, std::stod(c)});
    } catch (const std::exception&) {
      throw overdeck::ValidationError("samples line " + std::to_string(lineno) +
                                      ": non-numeric field");
    }
  }
  return samples;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"overdeck: deterministic cluster load-balancing simulator"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_path, format = "csv";
  std::optional<std::uint64_t> seed_flag;
  auto* run = app.add_subcommand("run", "run an experiment and report per-epoch results");
  run->add_option("--config", config_path, "JSON experiment config");
  std::string preset_list;
  for (const auto& n : overdeck::preset_names())
    preset_list += (preset_list.empty() ? "" : ", ") + n;
  run->add_option("--preset", preset_name, "built-in experiment (" + preset_list + ")");
  run->add_option("--seed", seed_flag, "override the experiment seed");
  run->add_option("--out", out_path, "write the report here instead of stdout");
  run->add_option("--format", format, "report format: csv or json");

  std::string samples_path;
  auto* calibrate = app.add_subcommand("calibrate", "fit the GPU kernel cost model");
  calibrate->add_option("--samples", samples_path,
                        "CSV of work_items,serial_depth,seconds (default: bundled probe)");

  int probe_n = 1024;
  double probe_inner = 2e5;
  std::vector<int> probe_m = {512, 256, 128, 64, 32};
  auto* probe = app.add_subcommand("probe", "print probe-kernel CPU/GPU timings");
  probe->add_option("--n", probe_n, "outer grid dimension");
  probe->add_option("--inner", probe_inner, "inner iterations per point");
  probe->add_option("--m", probe_m, "list of M values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (run->parsed()) {
      if (config_path.empty() == preset_name.empty())
        throw overdeck::ValidationError("run needs exactly one of --config or --preset");
      overdeck::RunConfig rc;
      if (!config_path.empty()) {
        rc = overdeck::parse_config(config_path);
      } else {
        rc.experiment = overdeck::preset(preset_name);
      }
      // precedence: --seed flag, then OVERDECK_SEED, then the config file
      if (const auto env_seed = seed_from_env()) rc.experiment.seed = *env_seed;
      if (seed_flag) rc.experiment.seed = *seed_flag;
      if (!format.empty()) rc.output.format = format;
      const auto fmt = overdeck::report_format_from_string(rc.output.format);
      const overdeck::Timeline tl = overdeck::run_experiment(rc.experiment);
      std::string dest = out_path;
      if (dest.empty() && !rc.output.directory.empty())
        dest = rc.output.directory + "/report." + rc.output.format;
      write_or_print(overdeck::render_report(tl, fmt), dest);
    } else if (calibrate->parsed()) {
      const auto samples = samples_path.empty()
                               ? overdeck::reference_gpu_probe_samples()
                               : read_sample_csv(samples_path);
      const overdeck::GpuCalibration fit = overdeck::calibrate_gpu(samples);
      std::printf("launch_overhead %.6e\n", fit.model.launch_overhead);
      std::printf("per_item_time %.6e\n", fit.model.per_item_time);
      std::printf("saturation_floor %.6e\n", fit.model.saturation_floor);
      std::printf("max_relative_residual %.4f\n", fit.max_relative_residual);
    } else if (probe->parsed()) {
      const auto fit = overdeck::calibrate_gpu(overdeck::reference_gpu_probe_samples());
      const auto cpu = overdeck::calibrate_cpu(overdeck::reference_cpu_probe_samples());
      std::printf("M,cpu_seconds,gpu_seconds\n");
      for (const auto& row :
           overdeck::scaling_probe(probe_n, probe_m, probe_inner, fit.model, cpu))
        std::printf("%d,%.4f,%.4f\n", row.m, row.cpu_seconds, row.gpu_seconds);
    }
  } catch (const overdeck::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const overdeck::RuntimeFault& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
