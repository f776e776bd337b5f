#include "doctest.h"

#include <cmath>
#include <fstream>

#include "support.hpp"
#include "wristangle/acquisition.hpp"

using namespace wristangle;
using testing::kind_of;

TEST_CASE("voltage divider") {
  const CircuitConfig c;
  CHECK(voltage_from_resistance(50'000.0, c) == doctest::Approx(1.65).epsilon(1e-15));
  CHECK(voltage_from_resistance(0.0, c) == 0.0);
  CHECK(voltage_from_resistance(150'000.0, c) == doctest::Approx(2.475).epsilon(1e-15));
  CHECK(kind_of([&] { voltage_from_resistance(-1.0, c); }) == ErrorKind::InvalidArgument);

  // Strictly increasing and bounded by vcc.
  double prev = -1.0;
  for (double r = 1.0; r < 1e12; r *= 1.7) {
    const double v = voltage_from_resistance(r, c);
    CHECK(v > prev);
    CHECK(v < c.vcc);
    prev = v;
  }
}

TEST_CASE("resistance from voltage") {
  const CircuitConfig c;
  CHECK(resistance_from_voltage(1.65, c) == 50'000.0);
  CHECK(resistance_from_voltage(0.0, c) == 0.0);
  for (double r = 1e2; r <= 1e7; r *= 10.0) {
    const double back = resistance_from_voltage(voltage_from_resistance(r, c), c);
    CHECK(std::abs(back - r) / r < 1e-9);
  }
  CHECK(kind_of([&] { resistance_from_voltage(3.3, c); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { resistance_from_voltage(4.0, c); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { resistance_from_voltage(-0.1, c); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("ADC quantization") {
  const CircuitConfig c;
  const double step = 3.3 / 1023.0;
  CHECK(quantize_voltage(0.0, c) == 0.0);
  CHECK(quantize_voltage(3.3, c) == doctest::Approx(3.3));
  CHECK(quantize_voltage(1.0, c) == doctest::Approx(std::round(1.0 / step) * step));
  CHECK(std::abs(quantize_voltage(1.2345, c) - 1.2345) <= step / 2 + 1e-15);
}

TEST_CASE("strain line grammar") {
  const CircuitConfig c;
  const auto f = parse_strain_line("120,1.6500,1.7012,1.5500,1.6000", c);
  CHECK(f.t_ms == 120);
  REQUIRE(f.voltages.size() == 4);
  CHECK(f.voltages(0) == 1.65);
  CHECK(f.voltages(1) == 1.7012);
  CHECK(f.voltages(2) == 1.55);
  CHECK(f.voltages(3) == 1.60);
  CHECK(parse_strain_line(" 5 , 1.0,2.0 ,3.0,0\r", c).t_ms == 5);

  try {
    parse_strain_line("120,1.65", c, 7);
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
    CHECK(std::string(e.what()).find("fields") != std::string::npos);
  }
  CHECK(kind_of([&] { parse_strain_line("120,1.6,abc,1.5,1.6", c); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { parse_strain_line("120,1.6,3.4,1.5,1.6", c); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { parse_strain_line("120,1.6,-0.1,1.5,1.6", c); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { parse_strain_line("x,1.6,1.6,1.5,1.6", c); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { parse_strain_line("12.5,1.6,1.6,1.5,1.6", c); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { parse_strain_line("120,1.6,1.6,1.5,nan", c); }) == ErrorKind::Parse);
}

TEST_CASE("imu line grammar") {
  const auto f = parse_imu_line("117,-3.25,41.70,1.02");
  CHECK(f.t_ms == 117);
  CHECK(f.theta(0) == -3.25);
  CHECK(f.theta(1) == 41.70);
  CHECK(f.theta(2) == 1.02);
  CHECK(kind_of([] { parse_imu_line("117,-3.25,41.70"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_imu_line("117,-3.25,181,0"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_imu_line("-1,0,0,0"); }) == ErrorKind::Parse);
}

TEST_CASE("formatted lines parse back") {
  const CircuitConfig c;
  StrainFrame f{400, Vector(4)};
  f.voltages << 1.651613, 1.648387, 2.077419, 2.083871;
  const auto back = parse_strain_line(format_strain_line(f), c);
  CHECK(back.t_ms == 400);
  CHECK((back.voltages - f.voltages).cwiseAbs().maxCoeff() < 1e-12);
  const ImuFrame g{30, Eigen::Vector3d(-7.2802, -10.4261, 3.4032)};
  CHECK((parse_imu_line(format_imu_line(g)).theta - g.theta).norm() < 1e-12);
}

TEST_CASE("file readers") {
  const auto dir = testing::scratch_dir("acq");
  {
    std::ofstream s(dir / "s.csv");
    s << "# comment\n0,1,1,1,1\n\n200,1.5,1.5,1.5,1.5\n";
    std::ofstream i(dir / "i.csv");
    i << "0,1,2,3\n30,1,2,3\n30,4,5,6\n";
    std::ofstream bad(dir / "bad.csv");
    bad << "0,1,2,3\n60,1,2,3\n30,1,2,3\n";
  }
  const CircuitConfig c;
  CHECK(read_strain_file(dir / "s.csv", c).size() == 2);
  CHECK(read_imu_file(dir / "i.csv").size() == 3);
  try {
    read_imu_file(dir / "bad.csv");
    FAIL("expected ordering parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK(kind_of([&] { read_imu_file(dir / "missing.csv"); }) == ErrorKind::Io);
  std::filesystem::remove_all(dir);
}
