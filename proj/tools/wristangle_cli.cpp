// wristangle: simulate / train / estimate / evaluate over replay files.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wristangle/error.hpp"
#include "wristangle/pipeline.hpp"

namespace fs = std::filesystem;
using namespace wristangle;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Parse: return 3;
    case ErrorKind::InsufficientData: return 4;
    case ErrorKind::Conditioning: return 5;
    case ErrorKind::ModelMismatch:
    case ErrorKind::Decode:
    case ErrorKind::UnsupportedVersion: return 6;
    case ErrorKind::Io: return 7;
    case ErrorKind::NoEstimates:
    case ErrorKind::NoOverlap: return 8;
    case ErrorKind::Ordering:
    case ErrorKind::InvalidArgument: return 9;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online wrist-angle estimation from strain wristband streams"};
  app.require_subcommand(1);

  std::string config;
  std::uint64_t seed = 0;
  std::string out;

  auto* simulate = app.add_subcommand("simulate", "Generate synthetic strain and IMU replay files");
  simulate->add_option("--config", config, "Scenario config (key = value)")->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "Override the scenario seed");
  simulate->add_option("--out", out, "Output directory")->required();

  std::string strain_file;
  std::string imu_file;
  auto* train = app.add_subcommand("train", "PSO node-count search + online OSELM training");
  train->add_option("--strain", strain_file, "Strain replay file")->required()->check(CLI::ExistingFile);
  train->add_option("--imu", imu_file, "IMU replay file")->required()->check(CLI::ExistingFile);
  train->add_option("--config", config, "Run config (key = value)")->check(CLI::ExistingFile);
  train->add_option("--seed", seed, "Override the run seed");
  train->add_option("--out", out, "Output directory")->required();

  std::string model_file;
  auto* estimate = app.add_subcommand("estimate", "Strain-only angle estimation with a saved model");
  estimate->add_option("--strain", strain_file, "Strain replay file")->required()->check(CLI::ExistingFile);
  estimate->add_option("--model", model_file, "Model file from 'train'")->required()->check(CLI::ExistingFile);
  estimate->add_option("--config", config, "Run config, for circuit constants")->check(CLI::ExistingFile);
  estimate->add_option("--out", out, "Output directory (writes estimates.csv)")->required();

  std::string estimates_file;
  std::string scenario = "default";
  std::int64_t start_ms = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Score estimates against IMU ground truth");
  evaluate->add_option("--estimates", estimates_file, "estimates.csv")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--imu", imu_file, "IMU replay file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--scenario", scenario, "Scenario label for the report");
  evaluate->add_option("--start-ms", start_ms, "Score only rows at or after this time");
  evaluate->add_option("--out", out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const auto files = cmd_simulate(config.empty() ? std::nullopt : std::optional<fs::path>(config),
                                      out,
                                      simulate->count("--seed") ? std::optional(seed) : std::nullopt);
      std::cout << fmt::format("strain={}\nimu={}\nmanifest={}\n", files.strain.string(),
                               files.imu.string(), files.manifest.string());
    } else if (*train) {
      RunConfig rc = config.empty() ? RunConfig{} : load_run_config(config);
      if (train->count("--seed")) rc.online.seed = seed;
      const auto res = cmd_train(strain_file, imu_file, rc, out);
      std::cout << fmt::format("chosen_n={}\ncutoff_t_ms={}\nheldout_samples={}\nmodel={}\n",
                               res.result.n_hidden, res.result.cutoff_t_ms,
                               res.result.estimates.size(), res.model.string());
    } else if (*estimate) {
      const RunConfig rc = config.empty() ? RunConfig{} : load_run_config(config);
      const fs::path path = fs::path(out) / "estimates.csv";
      const auto rows = cmd_estimate(strain_file, model_file, path, rc.circuit);
      std::cout << fmt::format("rows={}\nestimates={}\n", rows, path.string());
    } else if (*evaluate) {
      const auto r = cmd_evaluate(estimates_file, imu_file, out, scenario, start_ms);
      std::cout << fmt::format("r_squared={:.6f}\nmean_error_deg={:.6f}\nn_samples={}\n",
                               r.r_squared, r.mean_error_deg, r.n_samples);
    }
  } catch (const Error& e) {
    std::cerr << "wristangle: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "wristangle: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
