#pragma once

// Two-stage online pipeline over an aligned stream:
//   1. calibration window -> PSO picks the hidden-node count;
//   2. training segment (first fraction of the post-calibration stream) ->
//      OSELM init on the first block, chunked updates on the rest;
//   3. remaining samples -> strain-only estimates from the frozen model, with
//      the IMU average kept only as ground truth for scoring.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wristangle/alignment.hpp"
#include "wristangle/pso.hpp"

namespace wristangle {

struct OnlineConfig {
  std::int64_t calibration_span_ms = 10'000;
  double training_fraction = 0.25;
  Index chunk_size = 1;
  double ridge = kDefaultRidge;
  Activation activation = Activation::Sigmoid;
  PsoConfig pso;
  // > 0 fixes the node count and skips the PSO stage.
  int hidden_nodes = 0;
  // 0 means default_initial_block(N).
  Index initial_block = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Estimate {
  std::int64_t t_ms = 0;
  Eigen::Vector3d theta = Eigen::Vector3d::Zero();
  Eigen::Vector3d truth = Eigen::Vector3d::Zero();
};

struct OnlineResult {
  explicit OnlineResult(ElmModel m) : model(std::move(m)) {}

  ElmModel model;
  int n_hidden = 0;
  std::uint64_t hidden_seed = 0;
  std::optional<PsoResult> pso;
  int pso_n_max = 0;  // upper bound actually searched after data-size clamping
  std::size_t n_calibration = 0;
  std::size_t n_training = 0;
  Index initial_block = 0;
  std::uint64_t chunks = 0;
  // Timestamp of the first sample after the training cutoff (-1 if none).
  std::int64_t cutoff_t_ms = -1;
  std::vector<Estimate> estimates;
};

OnlineResult run_online(std::span<const AlignedSample> stream, const OnlineConfig& config);

}  // namespace wristangle
