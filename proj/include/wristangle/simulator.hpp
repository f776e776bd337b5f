#pragma once

// Synthetic wrist flexion/extension motion and fabric strain-sensor response,
// emitting the same replay streams the acquisition readers consume.
//
// The angle-to-strain kinematics and all imperfection constants here are
// modeling conventions, not measured hardware properties.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wristangle/acquisition.hpp"
#include "wristangle/config.hpp"

namespace wristangle {

struct TrajectoryConfig {
  double duration_s = 180.0;
  double cycle_period_s = 8.5;
  double flexion_peak_deg = 60.0;
  double extension_peak_deg = -60.0;
  double calibration_span_s = 10.0;
  // Amplitude of the theta_x / theta_z wobble after calibration.
  double offaxis_amplitude_deg = 2.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Sensor i is dorsal (stretched in flexion) for i < m/2, palmar otherwise.
struct SensorResponseModel {
  double r0 = 50'000.0;
  double gf_low = 10.3;
  double gf_high = 3.3;
  double knee = 0.06;
  double max_strain = 0.60;
  double noise_sd = 0.004;        // volts
  double drift_rate = 0.0002;     // fraction per second
  double relaxation_tau = 0.8;    // seconds, 0 = instantaneous
  std::vector<double> placement_gain = {0.45, 0.40, 0.40, 0.35};
  std::vector<double> placement_phase = {0.0, 0.0, 0.0, 0.0};  // radians

  void validate(int m_sensors) const;
  int side(int sensor_index, int m_sensors) const noexcept {
    return sensor_index < m_sensors / 2 ? +1 : -1;
  }
};

struct StreamTiming {
  int strain_frame_period_ms = 200;
  int imu_period_ms = 30;
  // Offset between consecutive sensor reads inside one frame sweep.
  int sensor_interval_ms = 50;

  void validate(int m_sensors) const;
};

// Continuous-time wrist motion: random calibration motion blending into
// periodic flexion/extension cycles.
class Trajectory {
 public:
  explicit Trajectory(const TrajectoryConfig& cfg);

  // (theta_x, theta_y, theta_z) in degrees at t seconds.
  Eigen::Vector3d at(double t_s) const;

  const TrajectoryConfig& config() const noexcept { return cfg_; }

 private:
  struct Tone {
    double amplitude;
    double freq_hz;
    double phase;
  };
  static double sum_tones(const std::vector<Tone>& tones, double t_s);
  double cycle_theta_y(double t_s) const;

  TrajectoryConfig cfg_;
  std::vector<Tone> calib_[3];
  std::vector<Tone> offaxis_[2];
};

// Samples the trajectory every period_ms over [0, duration).
std::vector<ImuFrame> gen_trajectory(const TrajectoryConfig& cfg, int period_ms);

double strain_from_angle(double theta_y_deg, int sensor_index, const SensorResponseModel& model,
                         int m_sensors = 4);

double resistance_from_strain(double strain, const SensorResponseModel& model);

// Complete description of one synthetic recording.
struct Scenario {
  std::string label = "default";
  std::uint64_t seed = 1;
  TrajectoryConfig trajectory;
  SensorResponseModel sensor;
  StreamTiming timing;
  CircuitConfig circuit;
  bool adc_quantize = true;

  void validate() const;
};

// Same scenario with noise, drift and relaxation switched off.
Scenario clean(Scenario s);

// Same scenario with every sensor's placement gain/phase shifted, standing in
// for a wristband worn at a different position.
Scenario misaligned(Scenario s);

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(std::string_view text, std::string source = "<scenario>");
// Fully resolved key/value text; parsing it back gives the same scenario.
std::string scenario_to_text(const Scenario& s);

struct SimulatedStreams {
  std::vector<StrainFrame> strain;
  std::vector<ImuFrame> imu;
};

SimulatedStreams simulate(const Scenario& scenario);

struct EmittedFiles {
  std::filesystem::path strain;
  std::filesystem::path imu;
  std::filesystem::path manifest;
};

// Writes strain.csv, imu.csv and manifest.cfg into `dir`.
EmittedFiles emit_streams(const Scenario& scenario, const std::filesystem::path& dir);

}  // namespace wristangle
