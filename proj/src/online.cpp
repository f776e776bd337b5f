#include "wristangle/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "wristangle/error.hpp"
#include "wristangle/seeds.hpp"

namespace wristangle {

void OnlineConfig::validate() const {
  if (calibration_span_ms < 0) throw Error(ErrorKind::Config, "calibration_span must be >= 0");
  if (!(training_fraction > 0.0 && training_fraction <= 1.0))
    throw Error(ErrorKind::Config, "training_fraction must lie in (0, 1]");
  if (chunk_size < 1) throw Error(ErrorKind::Config, "chunk_size must be >= 1");
  if (!(ridge >= 0.0)) throw Error(ErrorKind::Config, "ridge must be >= 0");
  if (hidden_nodes < 0) throw Error(ErrorKind::Config, "hidden_nodes must be >= 0");
  if (initial_block < 0) throw Error(ErrorKind::Config, "initial_block must be >= 0");
  if (hidden_nodes > 0 && initial_block > 0 && initial_block < hidden_nodes)
    throw Error(ErrorKind::Config, "initial_block must be >= hidden_nodes");
  if (hidden_nodes == 0) pso.validate();
}

namespace {

Index block_for(const OnlineConfig& cfg, int n) {
  return cfg.initial_block > 0 ? std::max<Index>(cfg.initial_block, n)
                               : default_initial_block(n);
}

}  // namespace

OnlineResult run_online(std::span<const AlignedSample> stream, const OnlineConfig& config) {
  config.validate();
  if (stream.empty()) throw Error(ErrorKind::InsufficientData, "aligned stream is empty");

  const std::int64_t calib_end = stream.front().t_ms + config.calibration_span_ms;
  const auto calib_len = static_cast<std::size_t>(
      std::find_if(stream.begin(), stream.end(),
                   [&](const AlignedSample& s) { return s.t_ms >= calib_end; }) -
      stream.begin());
  const auto calib = stream.first(calib_len);
  const auto post = stream.subspan(calib_len);
  const auto n_train = std::min(
      post.size(), static_cast<std::size_t>(std::ceil(
                       config.training_fraction * static_cast<double>(post.size()) - 1e-9)));
  const auto train = post.first(n_train);
  const auto held_out = post.subspan(n_train);

  const std::uint64_t hidden_seed = derive_seed(config.seed, "hidden");
  const FitnessOptions fitness_opts{config.activation, config.ridge, config.chunk_size};

  int n_hidden = config.hidden_nodes;
  std::optional<PsoResult> pso;
  int n_max = 0;
  if (n_hidden == 0) {
    n_max = config.pso.n_max;
    while (n_max >= config.pso.n_min &&
           (min_calibration_samples(n_max) > calib.size() ||
            static_cast<std::size_t>(block_for(config, n_max)) > train.size()))
      --n_max;
    if (n_max < config.pso.n_min)
      throw Error(ErrorKind::InsufficientData,
                  fmt::format("insufficient data: {} calibration and {} training samples; "
                              "{} hidden nodes need at least {} calibration and {} training "
                              "samples",
                              calib.size(), train.size(), config.pso.n_min,
                              min_calibration_samples(config.pso.n_min),
                              block_for(config, config.pso.n_min)));
    PsoConfig pso_cfg = config.pso;
    pso_cfg.n_max = n_max;
    pso_cfg.seed = derive_seed(config.seed, "pso");
    auto fitness = [&](int n) {
      try {
        return fitness_node_count(calib, n, hidden_seed, fitness_opts);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Conditioning) return std::numeric_limits<double>::infinity();
        throw;
      }
    };
    pso = pso_search(fitness, pso_cfg);
    n_hidden = pso->best_n;
  }

  const Index block = block_for(config, n_hidden);
  if (static_cast<std::size_t>(block) > train.size())
    throw Error(ErrorKind::InsufficientData,
                fmt::format("insufficient data: training segment has {} samples, initial block "
                            "for {} hidden nodes needs {}",
                            train.size(), n_hidden, block));

  const Index m = stream.front().voltages.size();
  const HiddenParams hidden = init_hidden_params(n_hidden, m, config.activation, hidden_seed);
  const OselmState state = train_sequential(hidden, train, block, config.chunk_size, config.ridge);

  OnlineResult result(state.model());
  result.n_hidden = n_hidden;
  result.hidden_seed = hidden_seed;
  result.pso = std::move(pso);
  result.pso_n_max = n_max;
  result.n_calibration = calib.size();
  result.n_training = train.size();
  result.initial_block = block;
  result.chunks = state.chunks_seen();
  result.cutoff_t_ms = held_out.empty() ? -1 : held_out.front().t_ms;

  if (!held_out.empty()) {
    const Matrix pred = predict_batch(result.model, stack_inputs(held_out));
    result.estimates.reserve(held_out.size());
    for (std::size_t i = 0; i < held_out.size(); ++i) {
      Estimate e;
      e.t_ms = held_out[i].t_ms;
      e.theta = pred.row(static_cast<Index>(i)).transpose();
      e.truth = held_out[i].theta_avg;
      result.estimates.push_back(e);
    }
  }
  return result;
}

}  // namespace wristangle
