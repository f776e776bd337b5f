#pragma once

// The four pipeline stages behind the command-line tool:
//   simulate -> strain.csv, imu.csv, manifest.cfg
//   train    -> model.bin, train.log, heldout.csv
//   estimate -> estimates.csv (strain only)
//   evaluate -> report.txt, overlay.csv, residuals.csv

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "wristangle/evaluation.hpp"
#include "wristangle/online.hpp"
#include "wristangle/simulator.hpp"

namespace wristangle {

struct RunConfig {
  OnlineConfig online;
  CircuitConfig circuit;

  void validate() const;
};

RunConfig parse_run_config(std::string_view text, std::string source = "<run config>");
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_text(const RunConfig& cfg);

// Loads the scenario (defaults when `config` is empty), applies the seed
// override and emits the replay files plus a manifest into `out_dir`.
EmittedFiles cmd_simulate(const std::optional<std::filesystem::path>& config,
                          const std::filesystem::path& out_dir,
                          std::optional<std::uint64_t> seed = std::nullopt);

struct TrainOutputs {
  explicit TrainOutputs(OnlineResult r) : result(std::move(r)) {}

  OnlineResult result;
  std::filesystem::path model;
  std::filesystem::path log;
  std::filesystem::path heldout;
};

TrainOutputs cmd_train(const std::filesystem::path& strain_file,
                       const std::filesystem::path& imu_file, const RunConfig& config,
                       const std::filesystem::path& out_dir);

// One row per strain frame: t_ms,theta_x,theta_y,theta_z.
std::size_t cmd_estimate(const std::filesystem::path& strain_file,
                         const std::filesystem::path& model_file,
                         const std::filesystem::path& output, const CircuitConfig& circuit = {});

struct EstimateRow {
  std::int64_t t_ms = 0;
  Eigen::Vector3d theta = Eigen::Vector3d::Zero();
};
std::vector<EstimateRow> read_estimates(const std::filesystem::path& path);

// Scores estimates against IMU truth averaged over each estimate's interval,
// keeping rows with t_ms >= start_ms.
EvalReport cmd_evaluate(const std::filesystem::path& estimates_file,
                        const std::filesystem::path& imu_file, const std::filesystem::path& out_dir,
                        const std::string& scenario = "default", std::int64_t start_ms = 0);

// Number of comma-separated fields on the first data line of a CSV file.
std::size_t csv_width(const std::filesystem::path& path);

}  // namespace wristangle
