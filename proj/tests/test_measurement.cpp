#include "catch2/catch_amalgamated.hpp"
#include "overdeck/measurement.hpp"

using namespace overdeck;

TEST_CASE("window splits an epoch into async head and sync tail") {
  MeasurementWindow w{6, 4};
  REQUIRE(w.epoch_steps() == 10);
  for (int s = 0; s < 6; ++s) CHECK(w.mode_of_step(s) == LaunchMode::Async);
  for (int s = 6; s < 10; ++s) CHECK(w.mode_of_step(s) == LaunchMode::Sync);
  CHECK_THROWS_AS((MeasurementWindow{-1, 4}.validate()), ValidationError);
  CHECK_THROWS_AS((MeasurementWindow{6, 0}.validate()), ValidationError);
}

TEST_CASE("epoch loads average synchronous samples only") {
  MeasurementWindow w{2, 2};
  LoadDB db(2, w);
  // async samples carry only the launch overhead, not the kernel time
  db.record({0, 0, LaunchMode::Async, 1e-4});
  db.record({1, 0, LaunchMode::Async, 1e-4});
  db.record({0, 1, LaunchMode::Async, 123.0});  // junk value, must be ignored
  db.record({1, 1, LaunchMode::Async, 456.0});
  db.record({0, 2, LaunchMode::Sync, 2.0});
  db.record({1, 2, LaunchMode::Sync, 5.0});
  db.record({0, 3, LaunchMode::Sync, 4.0});
  db.record({1, 3, LaunchMode::Sync, 7.0});
  auto loads = epoch_loads(db);
  CHECK(loads[0] == Catch::Approx(3.0));
  CHECK(loads[1] == Catch::Approx(6.0));
}

TEST_CASE("a vp without sync samples is an error") {
  LoadDB db(2, {1, 1});
  db.record({0, 0, LaunchMode::Async, 1e-4});
  db.record({0, 1, LaunchMode::Sync, 2.0});
  db.record({1, 0, LaunchMode::Async, 1e-4});
  CHECK_THROWS_AS(epoch_loads(db), RuntimeFault);
}

TEST_CASE("sample bookkeeping rejects bad records") {
  LoadDB db(2, {1, 1});
  db.record({0, 0, LaunchMode::Async, 1e-4});
  CHECK_THROWS_AS(db.record({0, 0, LaunchMode::Async, 1e-4}), RuntimeFault);
  CHECK_THROWS_AS(db.record({5, 0, LaunchMode::Async, 1e-4}), ValidationError);
  CHECK_THROWS_AS(db.record({1, 9, LaunchMode::Async, 1e-4}), RuntimeFault);
  CHECK_THROWS_AS(db.record({1, 1, LaunchMode::Sync, -1.0}), ValidationError);
  db.clear();
  CHECK_NOTHROW(db.record({0, 0, LaunchMode::Async, 1e-4}));
}

TEST_CASE("async launches report only the launch overhead") {
  GpuModel g;
  g.launch_overhead = 3e-4;
  auto s = launch_only_sample(7, 2, g);
  CHECK(s.vp == 7);
  CHECK(s.step == 2);
  CHECK(s.mode == LaunchMode::Async);
  CHECK(s.value == Catch::Approx(3e-4));
}
