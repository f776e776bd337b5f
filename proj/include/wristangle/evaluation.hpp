#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wristangle {

// Coefficient of determination, 1 - SS_res / SS_tot. Negative when the
// estimate is worse than the mean predictor.
double r_squared(std::span<const double> truth, std::span<const double> est);

// Mean absolute error, in the units of the inputs (degrees).
double mean_error(std::span<const double> truth, std::span<const double> est);

struct ScoredSample {
  std::int64_t t_ms = 0;
  Eigen::Vector3d truth = Eigen::Vector3d::Zero();
  Eigen::Vector3d estimate = Eigen::Vector3d::Zero();
};

// Only theta_y is scored; x and z travel along in the overlay file.
struct EvalReport {
  std::string scenario;
  double r_squared = 0.0;
  double mean_error_deg = 0.0;
  std::size_t n_samples = 0;
  std::vector<double> residuals;  // estimate - truth, theta_y
};

EvalReport evaluate(std::string scenario, std::span<const ScoredSample> samples);

// Writes <dir>/report.txt (key=value), <dir>/overlay.csv and <dir>/residuals.csv.
//   overlay:   t_ms,truth_x,truth_y,truth_z,est_x,est_y,est_z
//   residuals: t_ms,residual_y
void write_report(const std::filesystem::path& dir, const EvalReport& report,
                  std::span<const ScoredSample> samples);

EvalReport report(std::string scenario, std::span<const ScoredSample> samples,
                  const std::filesystem::path& dir);

}  // namespace wristangle
