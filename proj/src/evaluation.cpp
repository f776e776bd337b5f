#include "wristangle/evaluation.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "wristangle/error.hpp"

namespace wristangle {

namespace {

void check_lengths(std::span<const double> truth, std::span<const double> est, std::size_t min) {
  if (truth.size() != est.size())
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("length mismatch: {} truth vs {} estimates", truth.size(), est.size()));
  if (truth.size() < min)
    throw Error(ErrorKind::InvalidArgument, fmt::format("need at least {} samples", min));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", path.string()));
  return out;
}

}  // namespace

double r_squared(std::span<const double> truth, std::span<const double> est) {
  check_lengths(truth, est, 2);
  double mean = 0.0;
  for (double v : truth) mean += v;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - est[i]) * (truth[i] - est[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (ss_tot == 0.0)
    throw Error(ErrorKind::InvalidArgument, "r_squared undefined: ground truth has zero variance");
  return 1.0 - ss_res / ss_tot;
}

double mean_error(std::span<const double> truth, std::span<const double> est) {
  check_lengths(truth, est, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) sum += std::abs(truth[i] - est[i]);
  return sum / static_cast<double>(truth.size());
}

EvalReport evaluate(std::string scenario, std::span<const ScoredSample> samples) {
  if (samples.empty()) throw Error(ErrorKind::NoEstimates, "no estimates to evaluate");
  std::vector<double> truth;
  std::vector<double> est;
  truth.reserve(samples.size());
  est.reserve(samples.size());
  for (const auto& s : samples) {
    truth.push_back(s.truth.y());
    est.push_back(s.estimate.y());
  }
  EvalReport r;
  r.scenario = std::move(scenario);
  r.n_samples = samples.size();
  r.r_squared = samples.size() >= 2 ? r_squared(truth, est) : std::nan("");
  r.mean_error_deg = mean_error(truth, est);
  r.residuals.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) r.residuals.push_back(est[i] - truth[i]);
  return r;
}

void write_report(const std::filesystem::path& dir, const EvalReport& report,
                  std::span<const ScoredSample> samples) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "report.txt");
    out << fmt::format("scenario={}\n", report.scenario);
    out << fmt::format("r_squared={:.9f}\n", report.r_squared);
    out << fmt::format("mean_error_deg={:.9f}\n", report.mean_error_deg);
    out << fmt::format("n_samples={}\n", report.n_samples);
    out << "scored_axis=theta_y\n";
  }
  {
    auto out = open_out(dir / "overlay.csv");
    for (const auto& s : samples)
      out << fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", s.t_ms, s.truth(0),
                         s.truth(1), s.truth(2), s.estimate(0), s.estimate(1), s.estimate(2));
  }
  {
    auto out = open_out(dir / "residuals.csv");
    for (std::size_t i = 0; i < samples.size(); ++i)
      out << fmt::format("{},{:.6f}\n", samples[i].t_ms, report.residuals[i]);
  }
}

EvalReport report(std::string scenario, std::span<const ScoredSample> samples,
                  const std::filesystem::path& dir) {
  EvalReport r = evaluate(std::move(scenario), samples);
  write_report(dir, r, samples);
  return r;
}

}  // namespace wristangle
