#include "wristangle/acquisition.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include <fmt/format.h>

#include "wristangle/error.hpp"

namespace wristangle {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view tok, std::size_t line_no, const char* field) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (tok.empty() || ec != std::errc() || ptr != end)
    throw ParseError(line_no, fmt::format("non-numeric {} '{}'", field, tok));
  if (!std::isfinite(v)) throw ParseError(line_no, fmt::format("non-finite {}", field));
  return v;
}

std::int64_t parse_timestamp(std::string_view tok, std::size_t line_no) {
  std::int64_t v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (tok.empty() || ec != std::errc() || ptr != end)
    throw ParseError(line_no, fmt::format("non-integer timestamp '{}'", tok));
  if (v < 0) throw ParseError(line_no, "negative timestamp");
  return v;
}

template <typename Frame, typename ParseFn>
std::vector<Frame> read_lines(const std::filesystem::path& path, ParseFn parse) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open '{}'", path.string()));
  std::vector<Frame> frames;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    Frame f = parse(body, line_no);
    if (!frames.empty() && f.t_ms < frames.back().t_ms)
      throw ParseError(line_no, fmt::format("timestamp {} precedes previous {}", f.t_ms,
                                            frames.back().t_ms));
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace

void CircuitConfig::validate() const {
  if (!(vcc > 0.0)) throw Error(ErrorKind::Config, "circuit.vcc must be > 0");
  if (!(r_f > 0.0)) throw Error(ErrorKind::Config, "circuit.r_f must be > 0");
  if (adc_max_count < 1) throw Error(ErrorKind::Config, "circuit.adc_max_count must be >= 1");
  if (m_sensors < 1) throw Error(ErrorKind::Config, "circuit.m_sensors must be >= 1");
}

double voltage_from_resistance(double r_s, const CircuitConfig& cfg) {
  if (!(r_s >= 0.0) || !std::isfinite(r_s))
    throw Error(ErrorKind::InvalidArgument, fmt::format("sensor resistance {} is not >= 0", r_s));
  return cfg.vcc * r_s / (r_s + cfg.r_f);
}

double resistance_from_voltage(double v_adc, const CircuitConfig& cfg) {
  if (!(v_adc >= 0.0))
    throw Error(ErrorKind::InvalidArgument, fmt::format("voltage {} is negative", v_adc));
  if (v_adc >= cfg.vcc)
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("divider saturated: {} V >= vcc {} V", v_adc, cfg.vcc));
  return cfg.r_f * v_adc / (cfg.vcc - v_adc);
}

double quantize_voltage(double v, const CircuitConfig& cfg) {
  const double step = cfg.vcc / cfg.adc_max_count;
  const double code = std::clamp(std::round(v / step), 0.0, double(cfg.adc_max_count));
  return code * step;
}

StrainFrame parse_strain_line(std::string_view line, const CircuitConfig& cfg,
                              std::size_t line_no) {
  const auto fields = split_fields(trim(line));
  const auto expected = static_cast<std::size_t>(cfg.m_sensors) + 1;
  if (fields.size() != expected)
    throw ParseError(line_no, fmt::format("strain line has {} fields, expected {}",
                                          fields.size(), expected));
  StrainFrame f;
  f.t_ms = parse_timestamp(fields[0], line_no);
  f.voltages.resize(cfg.m_sensors);
  for (int i = 0; i < cfg.m_sensors; ++i) {
    const double v = parse_double(fields[i + 1], line_no, "voltage");
    if (v < 0.0 || v > cfg.vcc)
      throw ParseError(line_no, fmt::format("voltage {} outside [0, {}]", v, cfg.vcc));
    f.voltages(i) = v;
  }
  return f;
}

ImuFrame parse_imu_line(std::string_view line, std::size_t line_no) {
  const auto fields = split_fields(trim(line));
  if (fields.size() != 4)
    throw ParseError(line_no, fmt::format("imu line has {} fields, expected 4", fields.size()));
  ImuFrame f;
  f.t_ms = parse_timestamp(fields[0], line_no);
  for (int i = 0; i < 3; ++i) {
    const double a = parse_double(fields[i + 1], line_no, "angle");
    if (a < -180.0 || a > 180.0)
      throw ParseError(line_no, fmt::format("angle {} outside [-180, 180]", a));
    f.theta(i) = a;
  }
  return f;
}

std::string format_strain_line(const StrainFrame& f) {
  std::string out = fmt::format("{}", f.t_ms);
  for (Index i = 0; i < f.voltages.size(); ++i) out += fmt::format(",{:.6f}", f.voltages(i));
  return out;
}

std::string format_imu_line(const ImuFrame& f) {
  return fmt::format("{},{:.4f},{:.4f},{:.4f}", f.t_ms, f.theta(0), f.theta(1), f.theta(2));
}

std::vector<StrainFrame> read_strain_file(const std::filesystem::path& path,
                                          const CircuitConfig& cfg) {
  return read_lines<StrainFrame>(path, [&cfg](std::string_view l, std::size_t n) {
    return parse_strain_line(l, cfg, n);
  });
}

std::vector<ImuFrame> read_imu_file(const std::filesystem::path& path) {
  return read_lines<ImuFrame>(path,
                              [](std::string_view l, std::size_t n) { return parse_imu_line(l, n); });
}

}  // namespace wristangle
