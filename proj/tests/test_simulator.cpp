#include "doctest.h"

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "wristangle/alignment.hpp"
#include "wristangle/seeds.hpp"
#include "wristangle/simulator.hpp"

using namespace wristangle;
using testing::kind_of;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("trajectory peaks after calibration") {
  TrajectoryConfig cfg;
  cfg.cycle_period_s = 8.0;
  const Trajectory traj(cfg);
  double hi = -1e9, lo = 1e9;
  // 10 ms grid hits every cycle start (phase 0) and half-cycle exactly.
  for (int k = 1000; k < 18000; ++k) {
    const double y = traj.at(k * 0.01).y();
    hi = std::max(hi, y);
    lo = std::min(lo, y);
  }
  CHECK(hi == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(lo == doctest::Approx(-60.0).epsilon(1e-12));
  CHECK(traj.at(cfg.calibration_span_s).y() == doctest::Approx(60.0));

  // Off-axis angles stay small after calibration; all angles inside +-90 during it.
  for (int k = 0; k < 18000; ++k) {
    const auto th = traj.at(k * 0.01);
    CHECK(std::abs(th.y()) <= 90.0);
    if (k >= 1000) {
      CHECK(std::abs(th.x()) <= cfg.offaxis_amplitude_deg + 1e-12);
      CHECK(std::abs(th.z()) <= cfg.offaxis_amplitude_deg + 1e-12);
    }
  }
}

TEST_CASE("asymmetric peaks") {
  TrajectoryConfig cfg;
  cfg.flexion_peak_deg = 70.0;
  cfg.extension_peak_deg = -45.0;
  cfg.cycle_period_s = 5.0;
  const Trajectory traj(cfg);
  CHECK(traj.at(10.0).y() == doctest::Approx(70.0));
  CHECK(traj.at(12.5).y() == doctest::Approx(-45.0));
  CHECK(traj.at(11.25).y() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("zero crossings of theta_y") {
  TrajectoryConfig cfg;
  cfg.cycle_period_s = 8.5;
  const auto frames = gen_trajectory(cfg, 10);
  int crossings = 0;
  double prev = 0.0;
  bool have = false;
  for (const auto& f : frames) {
    if (f.t_ms < 10'000) continue;
    const double y = f.theta.y();
    if (have && (prev < 0.0) != (y < 0.0)) ++crossings;
    prev = y;
    have = true;
  }
  // 170 s / 8.5 s = 20 cycles, two crossings each.
  CHECK(crossings >= 39);
  CHECK(crossings <= 41);
}

TEST_CASE("gen_trajectory is deterministic and seed dependent") {
  TrajectoryConfig cfg;
  cfg.seed = 12;
  const auto a = gen_trajectory(cfg, 30);
  const auto b = gen_trajectory(cfg, 30);
  REQUIRE(a.size() == 6000);
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i].theta == b[i].theta;
  CHECK(same);
  cfg.seed = 13;
  const auto c = gen_trajectory(cfg, 30);
  CHECK(c[100].theta != a[100].theta);
}

TEST_CASE("trajectory config validation") {
  TrajectoryConfig cfg;
  cfg.duration_s = 5.0;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::Config);
  cfg = {};
  cfg.cycle_period_s = 0.0;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::Config);
  cfg = {};
  cfg.flexion_peak_deg = 95.0;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::Config);
}

TEST_CASE("strain_from_angle") {
  SensorResponseModel m;
  m.placement_gain = {0.4, 0.4, 0.4, 0.4};
  for (int i = 0; i < 4; ++i) CHECK(strain_from_angle(0.0, i, m) == 0.0);
  CHECK(strain_from_angle(90.0, 0, m) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(strain_from_angle(90.0, 2, m) == 0.0);
  CHECK(strain_from_angle(-90.0, 3, m) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(strain_from_angle(-30.0, 1, m) == 0.0);
  m.placement_gain[0] = 0.9;
  CHECK(strain_from_angle(90.0, 0, m) == m.max_strain);
  CHECK(kind_of([&] { strain_from_angle(91.0, 0, m); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { strain_from_angle(0.0, 4, m); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("piecewise gauge-factor response") {
  const SensorResponseModel m;
  CHECK(resistance_from_strain(0.0, m) == m.r0);
  CHECK(resistance_from_strain(0.06, m) / m.r0 - 1.0 == doctest::Approx(0.618).epsilon(1e-12));
  CHECK(resistance_from_strain(0.60, m) / m.r0 - 1.0 == doctest::Approx(2.400).epsilon(1e-12));
  CHECK(kind_of([&] { resistance_from_strain(-0.01, m); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { resistance_from_strain(0.61, m); }) == ErrorKind::InvalidArgument);

  // Continuous at the knee, strictly increasing on [0, max_strain].
  const double below = resistance_from_strain(0.06 - 1e-12, m);
  const double above = resistance_from_strain(0.06 + 1e-12, m);
  CHECK(above - below < 1e-6);
  double prev = -1.0;
  for (int k = 0; k <= 600; ++k) {
    const double r = resistance_from_strain(k * 0.001, m);
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("simulated stream sizes and IMU density") {
  const Scenario s;
  const auto streams = simulate(s);
  CHECK(streams.strain.size() == 900);
  CHECK(streams.imu.size() == 6000);
  CHECK(streams.strain.back().t_ms == 179'800);
  const auto aligned = align_streams(streams.strain, streams.imu);
  REQUIRE(aligned.size() == 900);
  for (const auto& a : aligned) {
    CHECK(a.imu_count >= 6);
    CHECK(a.imu_count <= 7);
  }
}

TEST_CASE("ideal sensors invert exactly") {
  Scenario s = clean(Scenario{});
  s.adc_quantize = false;
  const auto streams = simulate(s);
  TrajectoryConfig tcfg = s.trajectory;
  tcfg.seed = derive_seed(s.seed, "trajectory");
  const Trajectory traj(tcfg);
  double worst = 0.0;
  for (const auto& f : streams.strain) {
    for (int i = 0; i < 4; ++i) {
      const double t_read = (f.t_ms + 50.0 * i) / 1000.0;
      const double expected =
          resistance_from_strain(strain_from_angle(traj.at(t_read).y(), i, s.sensor), s.sensor);
      const double got = resistance_from_voltage(f.voltages(i), s.circuit);
      worst = std::max(worst, std::abs(got - expected) / expected);
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("imperfections change the signal in the expected direction") {
  Scenario ideal = clean(Scenario{});
  ideal.adc_quantize = false;
  Scenario drifting = ideal;
  drifting.sensor.drift_rate = 0.001;
  const auto a = simulate(ideal);
  const auto b = simulate(drifting);
  // Drift lowers resistance, hence voltage, more as time goes on.
  CHECK(b.strain.back().voltages(0) < a.strain.back().voltages(0));
  CHECK(b.strain.front().voltages(0) == doctest::Approx(a.strain.front().voltages(0)));

  Scenario lagging = ideal;
  lagging.sensor.relaxation_tau = 0.8;
  const auto c = simulate(lagging);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.strain.size(); ++i)
    diff = std::max(diff, (a.strain[i].voltages - c.strain[i].voltages).cwiseAbs().maxCoeff());
  CHECK(diff > 0.01);
}

TEST_CASE("emitted files are reproducible") {
  const auto dir = testing::scratch_dir("sim");
  Scenario s;
  s.sensor.noise_sd = 0.01;
  const auto f1 = emit_streams(s, dir / "a");
  const auto f2 = emit_streams(s, dir / "b");
  CHECK(slurp(f1.strain) == slurp(f2.strain));
  CHECK(slurp(f1.imu) == slurp(f2.imu));
  s.seed = 2;
  const auto f3 = emit_streams(s, dir / "c");
  CHECK(slurp(f1.strain) != slurp(f3.strain));
  // The manifest regenerates the same scenario.
  const Scenario back = load_scenario(f1.manifest);
  CHECK(scenario_to_text(back) == scenario_to_text(Scenario{.sensor = {.noise_sd = 0.01}}));
  std::filesystem::remove_all(dir);
}

TEST_CASE("scenario text") {
  const Scenario mis = misaligned(Scenario{});
  const Scenario back = parse_scenario(scenario_to_text(mis));
  CHECK(scenario_to_text(back) == scenario_to_text(mis));
  CHECK(back.sensor.placement_phase == mis.sensor.placement_phase);
  CHECK(back.label == "default-misaligned");

  const Scenario partial = parse_scenario("sensor.noise_sd = 0\n# comment\ntrajectory.duration = 60");
  CHECK(partial.sensor.noise_sd == 0.0);
  CHECK(partial.trajectory.duration_s == 60.0);
  CHECK(partial.timing.imu_period_ms == 30);

  try {
    parse_scenario("sensor.noise = 0.1\n");
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("sensor.noise") != std::string::npos);
  }
  CHECK(kind_of([] { parse_scenario("sensor.r0 = lots\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_scenario("sensor.placement_gain = 0.4, 0.4\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_scenario("timing.imu_period_ms = 300\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_scenario("seed = 1\nseed = 2\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_scenario("just words\n"); }) == ErrorKind::Config);
}
