#include <random>

#include "catch2/catch_amalgamated.hpp"
#include "overdeck/gpu_cost.hpp"

using namespace overdeck;

TEST_CASE("kernel time: zero work is free, floor clamps, affine above") {
  GpuModel g;
  g.launch_overhead = 1e-4;
  g.per_item_time = 1e-9;
  g.saturation_floor = 0.05;
  CHECK(kernel_time_sync({0, 0}, g) == 0.0);
  CHECK(kernel_time_sync({100, 1}, g) == Catch::Approx(0.05));  // clamped
  CHECK(kernel_time_sync({1e9, 1}, g) == Catch::Approx(1e-4 + 1.0));
}

TEST_CASE("cpu time is exactly linear") {
  CpuModel c{2e-9};
  CHECK(cpu_time({1e6, 3}, c) == Catch::Approx(6e-3));
  CHECK(cpu_time({2e6, 3}, c) / cpu_time({1e6, 3}, c) == Catch::Approx(2.0));
}

TEST_CASE("transfer time uses the directional bandwidth") {
  GpuModel g;
  g.h2d_bandwidth = 2e9;
  g.d2h_bandwidth = 4e9;
  CHECK(transfer_time(2e9, TransferDirection::HostToDevice, g) == Catch::Approx(1.0));
  CHECK(transfer_time(2e9, TransferDirection::DeviceToHost, g) == Catch::Approx(0.5));
  CHECK(transfer_time(0, TransferDirection::DeviceToHost, g) == 0.0);
  CHECK_THROWS_AS(transfer_time(-1, TransferDirection::DeviceToHost, g),
                  ValidationError);
}

TEST_CASE("node schedule: sync serializes, async overlaps") {
  GpuModel g;
  g.async_overlap_gain = 0.06;
  std::vector<double> jobs{3.0, 2.0, 1.0};
  CHECK(node_gpu_schedule(jobs, LaunchMode::Sync, g) == Catch::Approx(6.0));
  CHECK(node_gpu_schedule(jobs, LaunchMode::Async, g) == Catch::Approx(6.0 * 0.94));
  // one dominant job bounds the async schedule from below
  CHECK(node_gpu_schedule({10.0, 0.1}, LaunchMode::Async, g) == Catch::Approx(10.0));
  // single job: no overlap to exploit
  CHECK(node_gpu_schedule({5.0}, LaunchMode::Async, g) == Catch::Approx(5.0));
  CHECK_THROWS_AS(node_gpu_schedule({-1.0}, LaunchMode::Sync, g), ValidationError);
}

TEST_CASE("gpu calibration round-trips exact hinge data") {
  GpuModel truth;
  truth.launch_overhead = 2e-4;
  truth.per_item_time = 5e-12;
  truth.saturation_floor = 0.15;
  std::vector<CalibrationSample> samples;
  for (double items : {1e9, 2e10, 6e10, 1e11, 2e11})
    samples.push_back({{items, 1.0}, kernel_time_sync({items, 1.0}, truth)});

  auto fit = calibrate_gpu(samples);
  CHECK(fit.model.per_item_time ==
        Catch::Approx(truth.per_item_time).epsilon(1e-6));
  CHECK(fit.model.launch_overhead ==
        Catch::Approx(truth.launch_overhead).epsilon(1e-6));
  CHECK(fit.model.saturation_floor ==
        Catch::Approx(truth.saturation_floor).epsilon(1e-6));
  CHECK(fit.max_relative_residual < 1e-9);
}

TEST_CASE("cpu calibration round-trips linear data") {
  CpuModel truth{3.3e-9};
  std::vector<CalibrationSample> samples;
  for (double items : {1e8, 3e8, 9e8})
    samples.push_back({{items, 2.0}, cpu_time({items, 2.0}, truth)});
  CHECK(calibrate_cpu(samples).per_item_time ==
        Catch::Approx(truth.per_item_time).epsilon(1e-9));
}

TEST_CASE("bundled probe fit stays within tolerance") {
  auto fit = calibrate_gpu(reference_gpu_probe_samples());
  CHECK(fit.max_relative_residual <= 0.25);
  auto cpu = calibrate_cpu(reference_cpu_probe_samples());
  for (const auto& s : reference_cpu_probe_samples())
    CHECK(cpu_time(s.work, cpu) == Catch::Approx(s.seconds).epsilon(0.10));
}

TEST_CASE("calibration input validation") {
  CHECK_THROWS_AS(calibrate_gpu({{{1e9, 1}, 0.5}}), ValidationError);
  CHECK_THROWS_AS(calibrate_gpu({{{1e9, 1}, 0.5}, {{2e9, 1}, 0.0}, {{3e9, 1}, 1.0}}),
                  ValidationError);
  CHECK_THROWS_AS(calibrate_cpu({}), ValidationError);
}
