#include "wristangle/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "wristangle/error.hpp"
#include "wristangle/seeds.hpp"

namespace wristangle {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
// Length of the cross-fade from calibration motion into the cycles.
constexpr double kBlendSeconds = 1.0;

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += fmt::format("{}{}", i ? ", " : "", v[i]);
  return out;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", path.string()));
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw Error(ErrorKind::Io, fmt::format("write to '{}' failed", path.string()));
}

}  // namespace

void TrajectoryConfig::validate() const {
  if (!(cycle_period_s > 0.0)) throw Error(ErrorKind::Config, "trajectory.cycle_period must be > 0");
  if (!(calibration_span_s >= 0.0))
    throw Error(ErrorKind::Config, "trajectory.calibration_span must be >= 0");
  if (!(duration_s > calibration_span_s))
    throw Error(ErrorKind::Config, "trajectory.duration must exceed trajectory.calibration_span");
  if (!(flexion_peak_deg > extension_peak_deg) || flexion_peak_deg > 90.0 ||
      extension_peak_deg < -90.0)
    throw Error(ErrorKind::Config,
                "trajectory peaks must satisfy -90 <= extension_peak < flexion_peak <= 90");
  if (!(offaxis_amplitude_deg >= 0.0))
    throw Error(ErrorKind::Config, "trajectory.offaxis_amplitude must be >= 0");
}

void SensorResponseModel::validate(int m_sensors) const {
  if (!(r0 > 0.0)) throw Error(ErrorKind::Config, "sensor.r0 must be > 0");
  if (!(gf_low > 0.0) || !(gf_high > 0.0))
    throw Error(ErrorKind::Config, "sensor gauge factors must be > 0");
  if (!(knee > 0.0 && knee < max_strain))
    throw Error(ErrorKind::Config, "sensor strains must satisfy 0 < knee < max_strain");
  if (!(noise_sd >= 0.0) || !(drift_rate >= 0.0) || !(relaxation_tau >= 0.0))
    throw Error(ErrorKind::Config, "sensor noise_sd, drift_rate, relaxation_tau must be >= 0");
  if (placement_gain.size() != static_cast<std::size_t>(m_sensors) ||
      placement_phase.size() != static_cast<std::size_t>(m_sensors))
    throw Error(ErrorKind::Config,
                fmt::format("sensor.placement_gain and sensor.placement_phase need {} entries",
                            m_sensors));
  for (double g : placement_gain)
    if (!(g > 0.0)) throw Error(ErrorKind::Config, "sensor.placement_gain entries must be > 0");
}

void StreamTiming::validate(int m_sensors) const {
  if (strain_frame_period_ms < 1 || imu_period_ms < 1)
    throw Error(ErrorKind::Config, "timing periods must be >= 1 ms");
  if (imu_period_ms >= strain_frame_period_ms)
    throw Error(ErrorKind::Config, "timing.imu_period_ms must be < timing.strain_frame_period_ms");
  if (sensor_interval_ms < 0 || sensor_interval_ms * (m_sensors - 1) >= strain_frame_period_ms)
    throw Error(ErrorKind::Config, "timing.sensor_interval_ms sweep must fit inside one frame");
}

Trajectory::Trajectory(const TrajectoryConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  std::mt19937_64 rng(cfg_.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto make_tones = [&](int count, double f_lo, double f_hi, double total_amplitude) {
    std::vector<Tone> tones(static_cast<std::size_t>(count));
    double sum = 0.0;
    for (auto& t : tones) {
      t.amplitude = 0.3 + 0.7 * unit(rng);
      t.freq_hz = f_lo + (f_hi - f_lo) * unit(rng);
      t.phase = 2.0 * std::numbers::pi * unit(rng);
      sum += t.amplitude;
    }
    for (auto& t : tones) t.amplitude *= total_amplitude / sum;
    return tones;
  };
  const double span = std::max(cfg_.flexion_peak_deg, -cfg_.extension_peak_deg);
  calib_[1] = make_tones(4, 0.1, 0.5, 0.95 * span);
  calib_[0] = make_tones(3, 0.1, 0.5, 15.0);
  calib_[2] = make_tones(3, 0.1, 0.5, 15.0);
  offaxis_[0] = make_tones(2, 0.05, 0.3, cfg_.offaxis_amplitude_deg);
  offaxis_[1] = make_tones(2, 0.05, 0.3, cfg_.offaxis_amplitude_deg);
}

double Trajectory::sum_tones(const std::vector<Tone>& tones, double t_s) {
  double v = 0.0;
  for (const auto& t : tones)
    v += t.amplitude * std::sin(2.0 * std::numbers::pi * t.freq_hz * t_s + t.phase);
  return v;
}

// Starts at flexion when calibration ends: flexion -> neutral -> extension -> flexion.
double Trajectory::cycle_theta_y(double t_s) const {
  const double c =
      std::cos(2.0 * std::numbers::pi * (t_s - cfg_.calibration_span_s) / cfg_.cycle_period_s);
  return c >= 0.0 ? cfg_.flexion_peak_deg * c : -cfg_.extension_peak_deg * c;
}

Eigen::Vector3d Trajectory::at(double t_s) const {
  const double cal = cfg_.calibration_span_s;
  const Eigen::Vector3d cycle(sum_tones(offaxis_[0], t_s), cycle_theta_y(t_s),
                              sum_tones(offaxis_[1], t_s));
  if (t_s >= cal) return cycle;
  Eigen::Vector3d random(sum_tones(calib_[0], t_s), sum_tones(calib_[1], t_s),
                         sum_tones(calib_[2], t_s));
  random.y() = std::clamp(random.y(), cfg_.extension_peak_deg, cfg_.flexion_peak_deg);
  const double blend = std::min(kBlendSeconds, cal);
  const double w = blend > 0.0 ? smoothstep((t_s - (cal - blend)) / blend) : 1.0;
  return (1.0 - w) * random + w * cycle;
}

std::vector<ImuFrame> gen_trajectory(const TrajectoryConfig& cfg, int period_ms) {
  if (period_ms < 1) throw Error(ErrorKind::InvalidArgument, "sampling period must be >= 1 ms");
  const Trajectory traj(cfg);
  const auto duration_ms = static_cast<std::int64_t>(std::llround(cfg.duration_s * 1000.0));
  std::vector<ImuFrame> out;
  out.reserve(static_cast<std::size_t>(duration_ms / period_ms + 1));
  for (std::int64_t t = 0; t < duration_ms; t += period_ms)
    out.push_back(ImuFrame{t, traj.at(static_cast<double>(t) / 1000.0)});
  return out;
}

double strain_from_angle(double theta_y_deg, int sensor_index, const SensorResponseModel& model,
                         int m_sensors) {
  if (!(std::abs(theta_y_deg) <= 90.0))
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("theta_y {} outside [-90, 90]", theta_y_deg));
  if (sensor_index < 0 || static_cast<std::size_t>(sensor_index) >= model.placement_gain.size() ||
      static_cast<std::size_t>(sensor_index) >= model.placement_phase.size())
    throw Error(ErrorKind::InvalidArgument, fmt::format("no sensor {}", sensor_index));
  const auto i = static_cast<std::size_t>(sensor_index);
  const double s = model.side(sensor_index, m_sensors);
  const double stretch =
      std::max(0.0, s * std::sin(theta_y_deg * kDegToRad + model.placement_phase[i]));
  return std::clamp(model.placement_gain[i] * stretch, 0.0, model.max_strain);
}

double resistance_from_strain(double strain, const SensorResponseModel& model) {
  if (!(strain >= 0.0 && strain <= model.max_strain))
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("strain {} outside [0, {}]", strain, model.max_strain));
  const double rel = strain <= model.knee
                         ? model.gf_low * strain
                         : model.gf_low * model.knee + model.gf_high * (strain - model.knee);
  return model.r0 * (1.0 + rel);
}

void Scenario::validate() const {
  circuit.validate();
  trajectory.validate();
  sensor.validate(circuit.m_sensors);
  timing.validate(circuit.m_sensors);
}

Scenario clean(Scenario s) {
  s.sensor.noise_sd = 0.0;
  s.sensor.drift_rate = 0.0;
  s.sensor.relaxation_tau = 0.0;
  return s;
}

Scenario misaligned(Scenario s) {
  static constexpr double kGainScale[] = {0.75, 1.3, 1.2, 0.8};
  static constexpr double kPhaseShift[] = {0.20, -0.15, 0.12, -0.18};
  for (std::size_t i = 0; i < s.sensor.placement_gain.size(); ++i) {
    s.sensor.placement_gain[i] *= kGainScale[i % 4];
    s.sensor.placement_phase[i] += kPhaseShift[i % 4];
  }
  s.label += "-misaligned";
  return s;
}

Scenario parse_scenario(std::string_view text, std::string source) {
  KeyValueConfig kv = KeyValueConfig::parse(text, std::move(source));
  Scenario s;
  kv.get("scenario", s.label);
  kv.get("seed", s.seed);
  kv.get("trajectory.duration", s.trajectory.duration_s);
  kv.get("trajectory.cycle_period", s.trajectory.cycle_period_s);
  kv.get("trajectory.flexion_peak", s.trajectory.flexion_peak_deg);
  kv.get("trajectory.extension_peak", s.trajectory.extension_peak_deg);
  kv.get("trajectory.calibration_span", s.trajectory.calibration_span_s);
  kv.get("trajectory.offaxis_amplitude", s.trajectory.offaxis_amplitude_deg);
  kv.get("sensor.r0", s.sensor.r0);
  kv.get("sensor.gf_low", s.sensor.gf_low);
  kv.get("sensor.gf_high", s.sensor.gf_high);
  kv.get("sensor.knee", s.sensor.knee);
  kv.get("sensor.max_strain", s.sensor.max_strain);
  kv.get("sensor.noise_sd", s.sensor.noise_sd);
  kv.get("sensor.drift_rate", s.sensor.drift_rate);
  kv.get("sensor.relaxation_tau", s.sensor.relaxation_tau);
  kv.get("sensor.placement_gain", s.sensor.placement_gain);
  kv.get("sensor.placement_phase", s.sensor.placement_phase);
  kv.get("timing.strain_frame_period_ms", s.timing.strain_frame_period_ms);
  kv.get("timing.imu_period_ms", s.timing.imu_period_ms);
  kv.get("timing.sensor_interval_ms", s.timing.sensor_interval_ms);
  kv.get("circuit.vcc", s.circuit.vcc);
  kv.get("circuit.r_f", s.circuit.r_f);
  kv.get("circuit.adc_max_count", s.circuit.adc_max_count);
  kv.get("circuit.m_sensors", s.circuit.m_sensors);
  kv.get("circuit.adc_quantize", s.adc_quantize);
  kv.finish();
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open scenario '{}'", path.string()));
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scenario(text, path.string());
}

std::string scenario_to_text(const Scenario& s) {
  std::string out;
  auto line = [&out](std::string_view key, const auto& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  line("scenario", s.label);
  line("seed", s.seed);
  line("trajectory.duration", s.trajectory.duration_s);
  line("trajectory.cycle_period", s.trajectory.cycle_period_s);
  line("trajectory.flexion_peak", s.trajectory.flexion_peak_deg);
  line("trajectory.extension_peak", s.trajectory.extension_peak_deg);
  line("trajectory.calibration_span", s.trajectory.calibration_span_s);
  line("trajectory.offaxis_amplitude", s.trajectory.offaxis_amplitude_deg);
  line("sensor.r0", s.sensor.r0);
  line("sensor.gf_low", s.sensor.gf_low);
  line("sensor.gf_high", s.sensor.gf_high);
  line("sensor.knee", s.sensor.knee);
  line("sensor.max_strain", s.sensor.max_strain);
  line("sensor.noise_sd", s.sensor.noise_sd);
  line("sensor.drift_rate", s.sensor.drift_rate);
  line("sensor.relaxation_tau", s.sensor.relaxation_tau);
  line("sensor.placement_gain", join(s.sensor.placement_gain));
  line("sensor.placement_phase", join(s.sensor.placement_phase));
  line("timing.strain_frame_period_ms", s.timing.strain_frame_period_ms);
  line("timing.imu_period_ms", s.timing.imu_period_ms);
  line("timing.sensor_interval_ms", s.timing.sensor_interval_ms);
  line("circuit.vcc", s.circuit.vcc);
  line("circuit.r_f", s.circuit.r_f);
  line("circuit.adc_max_count", s.circuit.adc_max_count);
  line("circuit.m_sensors", s.circuit.m_sensors);
  line("circuit.adc_quantize", s.adc_quantize ? "true" : "false");
  return out;
}

SimulatedStreams simulate(const Scenario& scenario) {
  scenario.validate();
  TrajectoryConfig tcfg = scenario.trajectory;
  tcfg.seed = derive_seed(scenario.seed, "trajectory");
  const Trajectory traj(tcfg);
  const SensorResponseModel& sensor = scenario.sensor;
  const CircuitConfig& circuit = scenario.circuit;
  const int m = circuit.m_sensors;

  SimulatedStreams out;
  const auto duration_ms = static_cast<std::int64_t>(std::llround(tcfg.duration_s * 1000.0));
  for (std::int64_t t = 0; t < duration_ms; t += scenario.timing.imu_period_ms)
    out.imu.push_back(ImuFrame{t, traj.at(static_cast<double>(t) / 1000.0)});

  std::mt19937_64 noise_rng(derive_seed(scenario.seed, "noise"));
  std::normal_distribution<double> noise(0.0, 1.0);
  const double dt = scenario.timing.strain_frame_period_ms / 1000.0;
  const double lag_alpha =
      sensor.relaxation_tau > 0.0 ? 1.0 - std::exp(-dt / sensor.relaxation_tau) : 1.0;
  std::vector<double> lagged(static_cast<std::size_t>(m), -1.0);

  for (std::int64_t t = 0; t < duration_ms; t += scenario.timing.strain_frame_period_ms) {
    StrainFrame frame{t, Vector(m)};
    // The frame is stamped at sweep start; sensor i is read i intervals later.
    for (int i = 0; i < m; ++i) {
      const double t_read =
          static_cast<double>(t + static_cast<std::int64_t>(i) * scenario.timing.sensor_interval_ms) /
          1000.0;
      const double theta_y = std::clamp(traj.at(t_read).y(), -90.0, 90.0);
      const double target = resistance_from_strain(strain_from_angle(theta_y, i, sensor, m), sensor);
      auto& r = lagged[static_cast<std::size_t>(i)];
      r = r < 0.0 ? target : r + lag_alpha * (target - r);
      const double observed = r * std::exp(-sensor.drift_rate * t_read);
      double v = voltage_from_resistance(observed, circuit);
      if (sensor.noise_sd > 0.0) v += sensor.noise_sd * noise(noise_rng);
      v = std::clamp(v, 0.0, circuit.vcc);
      if (scenario.adc_quantize) v = quantize_voltage(v, circuit);
      frame.voltages(i) = v;
    }
    out.strain.push_back(std::move(frame));
  }
  return out;
}

EmittedFiles emit_streams(const Scenario& scenario, const std::filesystem::path& dir) {
  const SimulatedStreams streams = simulate(scenario);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  EmittedFiles files{dir / "strain.csv", dir / "imu.csv", dir / "manifest.cfg"};
  std::vector<std::string> lines;
  lines.reserve(streams.strain.size());
  for (const auto& f : streams.strain) lines.push_back(format_strain_line(f));
  write_lines(files.strain, lines);
  lines.clear();
  for (const auto& f : streams.imu) lines.push_back(format_imu_line(f));
  write_lines(files.imu, lines);
  write_lines(files.manifest, {"# wristangle simulate manifest; feed back via --config to "
                               "reproduce these files",
                               scenario_to_text(scenario)});
  return files;
}

}  // namespace wristangle
