#include "wristangle/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "wristangle/error.hpp"

namespace wristangle {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", path.string()));
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw Error(ErrorKind::Io, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += fmt::format("{}{:.9g}", i ? "," : "", v[i]);
  return out;
}

}  // namespace

void RunConfig::validate() const {
  circuit.validate();
  online.validate();
}

RunConfig parse_run_config(std::string_view text, std::string source) {
  KeyValueConfig kv = KeyValueConfig::parse(text, std::move(source));
  RunConfig cfg;
  OnlineConfig& o = cfg.online;
  double calibration_s = static_cast<double>(o.calibration_span_ms) / 1000.0;
  kv.get("calibration_span", calibration_s);
  if (!(calibration_s >= 0.0) || !std::isfinite(calibration_s))
    throw Error(ErrorKind::Config, "calibration_span must be >= 0");
  o.calibration_span_ms = std::llround(calibration_s * 1000.0);
  kv.get("training_fraction", o.training_fraction);
  std::int64_t chunk = o.chunk_size;
  kv.get("chunk_size", chunk);
  o.chunk_size = chunk;
  kv.get("ridge", o.ridge);
  std::string activation = to_string(o.activation);
  kv.get("activation", activation);
  try {
    o.activation = activation_from_string(activation);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  kv.get("hidden_nodes", o.hidden_nodes);
  std::int64_t block = o.initial_block;
  kv.get("initial_block", block);
  o.initial_block = block;
  kv.get("seed", o.seed);
  kv.get("pso.swarm_size", o.pso.swarm_size);
  kv.get("pso.iterations", o.pso.iterations);
  kv.get("pso.inertia", o.pso.inertia);
  kv.get("pso.cognitive", o.pso.cognitive);
  kv.get("pso.social", o.pso.social);
  kv.get("pso.n_min", o.pso.n_min);
  kv.get("pso.n_max", o.pso.n_max);
  kv.get("circuit.vcc", cfg.circuit.vcc);
  kv.get("circuit.r_f", cfg.circuit.r_f);
  kv.get("circuit.adc_max_count", cfg.circuit.adc_max_count);
  kv.get("circuit.m_sensors", cfg.circuit.m_sensors);
  kv.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open run config '{}'", path.string()));
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text, path.string());
}

std::string run_config_to_text(const RunConfig& cfg) {
  const OnlineConfig& o = cfg.online;
  std::string out;
  auto line = [&out](std::string_view key, const auto& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  line("calibration_span", static_cast<double>(o.calibration_span_ms) / 1000.0);
  line("training_fraction", o.training_fraction);
  line("chunk_size", o.chunk_size);
  line("ridge", o.ridge);
  line("activation", to_string(o.activation));
  line("hidden_nodes", o.hidden_nodes);
  line("initial_block", o.initial_block);
  line("seed", o.seed);
  line("pso.swarm_size", o.pso.swarm_size);
  line("pso.iterations", o.pso.iterations);
  line("pso.inertia", o.pso.inertia);
  line("pso.cognitive", o.pso.cognitive);
  line("pso.social", o.pso.social);
  line("pso.n_min", o.pso.n_min);
  line("pso.n_max", o.pso.n_max);
  line("circuit.vcc", cfg.circuit.vcc);
  line("circuit.r_f", cfg.circuit.r_f);
  line("circuit.adc_max_count", cfg.circuit.adc_max_count);
  line("circuit.m_sensors", cfg.circuit.m_sensors);
  return out;
}

EmittedFiles cmd_simulate(const std::optional<std::filesystem::path>& config,
                          const std::filesystem::path& out_dir,
                          std::optional<std::uint64_t> seed) {
  Scenario scenario = config ? load_scenario(*config) : Scenario{};
  if (seed) scenario.seed = *seed;
  return emit_streams(scenario, out_dir);
}

TrainOutputs cmd_train(const std::filesystem::path& strain_file,
                       const std::filesystem::path& imu_file, const RunConfig& config,
                       const std::filesystem::path& out_dir) {
  config.validate();
  const auto strain = read_strain_file(strain_file, config.circuit);
  const auto imu = read_imu_file(imu_file);
  AlignStats stats;
  const auto aligned = align_streams(strain, imu, &stats);
  if (aligned.empty())
    throw Error(ErrorKind::InsufficientData, "no aligned samples: streams do not overlap");

  TrainOutputs out(run_online(aligned, config.online));
  ensure_dir(out_dir);
  out.model = out_dir / "model.bin";
  out.log = out_dir / "train.log";
  out.heldout = out_dir / "heldout.csv";
  write_model_file(out.model, out.result.model);

  const OnlineResult& r = out.result;
  {
    auto log = open_out(out.log);
    log << fmt::format("strain_frames={}\nimu_frames={}\naligned_samples={}\n", strain.size(),
                       imu.size(), aligned.size());
    log << fmt::format("imu_before_first_strain={}\nimu_late={}\n", stats.imu_before_first_strain,
                       stats.imu_late);
    log << fmt::format("calibration_samples={}\ntraining_samples={}\n", r.n_calibration,
                       r.n_training);
    log << fmt::format("pso_stage={}\n", r.pso ? "run" : "skipped");
    if (r.pso) {
      log << fmt::format("pso_bounds={},{}\n", config.online.pso.n_min, r.pso_n_max);
      log << fmt::format("pso_best_fitness={:.9g}\n", r.pso->best_fitness);
      log << fmt::format("pso_fitness_trace={}\n", join_doubles(r.pso->best_trace));
      log << fmt::format("pso_evaluations={}\n", r.pso->evaluated.size());
    }
    log << fmt::format("chosen_n={}\nhidden_seed={}\ninitial_block={}\nchunks={}\n", r.n_hidden,
                       r.hidden_seed, r.initial_block, r.chunks);
    log << fmt::format("cutoff_t_ms={}\nheldout_samples={}\n", r.cutoff_t_ms, r.estimates.size());
    log << "# run config\n" << run_config_to_text(config);
  }
  {
    auto csv = open_out(out.heldout);
    for (const auto& e : r.estimates)
      csv << fmt::format("{},{:.10f},{:.10f},{:.10f},{:.6f},{:.6f},{:.6f}\n", e.t_ms, e.theta(0),
                         e.theta(1), e.theta(2), e.truth(0), e.truth(1), e.truth(2));
  }
  return out;
}

std::size_t csv_width(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open '{}'", path.string()));
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  }
  return 0;
}

std::size_t cmd_estimate(const std::filesystem::path& strain_file,
                         const std::filesystem::path& model_file,
                         const std::filesystem::path& output, const CircuitConfig& circuit) {
  const ElmModel model = read_model_file(model_file);
  const std::size_t width = csv_width(strain_file);
  if (width == 0) throw Error(ErrorKind::InsufficientData, "strain file has no frames");
  if (width != static_cast<std::size_t>(model.n_inputs()) + 1)
    throw Error(ErrorKind::ModelMismatch,
                fmt::format("strain file has {} sensors, model expects {}", width - 1,
                            model.n_inputs()));
  CircuitConfig cfg = circuit;
  cfg.m_sensors = static_cast<int>(model.n_inputs());
  const auto frames = read_strain_file(strain_file, cfg);

  Matrix x(static_cast<Index>(frames.size()), model.n_inputs());
  for (std::size_t i = 0; i < frames.size(); ++i)
    x.row(static_cast<Index>(i)) = frames[i].voltages.transpose();
  const Matrix pred = predict_batch(model, x);
  if (output.has_parent_path()) ensure_dir(output.parent_path());
  auto out = open_out(output);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto row = static_cast<Index>(i);
    out << frames[i].t_ms;
    for (Index j = 0; j < pred.cols(); ++j) out << fmt::format(",{:.10f}", pred(row, j));
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, fmt::format("write to '{}' failed", output.string()));
  return frames.size();
}

std::vector<EstimateRow> read_estimates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open '{}'", path.string()));
  std::vector<EstimateRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 4)
      throw ParseError(line_no, fmt::format("estimate line has {} fields, expected 4",
                                            fields.size()));
    EstimateRow row;
    auto parse = [&](std::string_view tok, auto& v) {
      while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) tok.remove_suffix(1);
      while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
      const auto* end = tok.data() + tok.size();
      auto [ptr, ec] = std::from_chars(tok.data(), end, v);
      if (tok.empty() || ec != std::errc() || ptr != end)
        throw ParseError(line_no, fmt::format("bad number '{}'", tok));
    };
    parse(fields[0], row.t_ms);
    for (int i = 0; i < 3; ++i) parse(fields[static_cast<std::size_t>(i) + 1], row.theta(i));
    if (!rows.empty() && row.t_ms <= rows.back().t_ms)
      throw ParseError(line_no, "estimate timestamps must be strictly increasing");
    rows.push_back(row);
  }
  return rows;
}

EvalReport cmd_evaluate(const std::filesystem::path& estimates_file,
                        const std::filesystem::path& imu_file, const std::filesystem::path& out_dir,
                        const std::string& scenario, std::int64_t start_ms) {
  const auto estimates = read_estimates(estimates_file);
  const auto imu = read_imu_file(imu_file);
  if (estimates.empty()) throw Error(ErrorKind::NoEstimates, "estimate file is empty");
  if (imu.empty() || imu.back().t_ms < estimates.front().t_ms ||
      imu.front().t_ms > estimates.back().t_ms)
    throw Error(ErrorKind::NoOverlap, "estimates and IMU stream share no time range");

  // Estimates take the place of strain frames as the time base.
  AlignQueue q;
  for (const auto& e : estimates) q.push_strain(StrainFrame{e.t_ms, Vector(e.theta)});
  for (const auto& f : imu) q.push_imu(f);
  q.flush();
  std::vector<ScoredSample> scored;
  for (const auto& s : q.drain()) {
    if (s.t_ms < start_ms) continue;
    scored.push_back(ScoredSample{s.t_ms, s.theta_avg, Eigen::Vector3d(s.voltages)});
  }
  if (scored.empty())
    throw Error(ErrorKind::NoEstimates, fmt::format("no estimates at or after t={} ms", start_ms));
  return report(scenario, scored, out_dir);
}

}  // namespace wristangle
