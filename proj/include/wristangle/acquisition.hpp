#pragma once

// Voltage-divider circuit model and the replay-file line grammars.
//
// Each sensor R_s sits between ground and a reference resistor R_f tied to VCC,
// so the ADC sees V = VCC * R_s / (R_s + R_f).
//
// Replay files are header-less CSV, one frame per line:
//   strain: t_ms "," v_1 "," ... "," v_m      (volts)
//   imu:    t_ms "," theta_x "," theta_y "," theta_z   (degrees)

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "wristangle/elm.hpp"

namespace wristangle {

struct CircuitConfig {
  double vcc = 3.3;
  double r_f = 50'000.0;
  int adc_max_count = 1023;
  int m_sensors = 4;

  void validate() const;
};

struct StrainFrame {
  std::int64_t t_ms = 0;
  Vector voltages;
};

struct ImuFrame {
  std::int64_t t_ms = 0;
  Eigen::Vector3d theta = Eigen::Vector3d::Zero();
};

double voltage_from_resistance(double r_s, const CircuitConfig& cfg);

/// Inverse of voltage_from_resistance. v >= vcc means the divider is saturated.
double resistance_from_voltage(double v_adc, const CircuitConfig& cfg);

// Round a voltage to the nearest ADC code and back to volts.
double quantize_voltage(double v, const CircuitConfig& cfg);

StrainFrame parse_strain_line(std::string_view line, const CircuitConfig& cfg,
                              std::size_t line_no = 0);
ImuFrame parse_imu_line(std::string_view line, std::size_t line_no = 0);

std::string format_strain_line(const StrainFrame& f);
std::string format_imu_line(const ImuFrame& f);

// Whole-file readers. Blank lines and lines starting with '#' are skipped;
// timestamps must be non-decreasing.
std::vector<StrainFrame> read_strain_file(const std::filesystem::path& path,
                                          const CircuitConfig& cfg);
std::vector<ImuFrame> read_imu_file(const std::filesystem::path& path);

}  // namespace wristangle
