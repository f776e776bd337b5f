#include "wristangle/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <fmt/format.h>

#include "wristangle/error.hpp"

namespace wristangle {

void PsoConfig::validate() const {
  if (swarm_size < 2) throw Error(ErrorKind::Config, "pso.swarm_size must be >= 2");
  if (iterations < 0) throw Error(ErrorKind::Config, "pso.iterations must be >= 0");
  if (n_min < 1) throw Error(ErrorKind::Config, "pso.n_min must be >= 1");
  if (n_min > n_max) throw Error(ErrorKind::Config, "pso.n_min must be <= pso.n_max");
  if (!(inertia > 0.0) || !(cognitive > 0.0) || !(social > 0.0))
    throw Error(ErrorKind::Config, "pso.inertia, pso.cognitive and pso.social must be > 0");
}

PsoResult pso_search(const NodeCountFitness& fitness, const PsoConfig& config) {
  config.validate();
  const double lo = config.n_min;
  const double hi = config.n_max;
  const double v_max = 0.5 * (hi - lo);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  PsoResult result;
  std::map<int, double> cache;
  auto score = [&](double position) {
    const int n = static_cast<int>(std::lround(std::clamp(position, lo, hi)));
    auto it = cache.find(n);
    if (it == cache.end()) {
      double f = fitness(n);
      if (std::isnan(f)) f = std::numeric_limits<double>::infinity();
      it = cache.emplace(n, f).first;
      result.evaluated.push_back(n);
    }
    return std::pair{n, it->second};
  };

  struct Particle {
    double position;
    double velocity;
    double best_position;
    double best_fitness;
  };
  std::vector<Particle> swarm(static_cast<std::size_t>(config.swarm_size));

  int best_n = config.n_min;
  double best_position = lo;
  double best_fitness = std::numeric_limits<double>::infinity();
  // Ties go to the smaller node count so the outcome does not depend on
  // evaluation order.
  auto offer = [&](int n, double position, double f) {
    if (f < best_fitness || (f == best_fitness && n < best_n)) {
      best_fitness = f;
      best_n = n;
      best_position = position;
    }
  };

  for (auto& p : swarm) {
    p.position = lo + (hi - lo) * unit(rng);
    p.velocity = v_max * (2.0 * unit(rng) - 1.0);
  }
  for (auto& p : swarm) {
    const auto [n, f] = score(p.position);
    p.best_position = p.position;
    p.best_fitness = f;
    offer(n, p.position, f);
  }
  result.best_trace.push_back(best_fitness);

  for (int it = 0; it < config.iterations; ++it) {
    for (auto& p : swarm) {
      const double r1 = unit(rng);
      const double r2 = unit(rng);
      p.velocity = config.inertia * p.velocity +
                   config.cognitive * r1 * (p.best_position - p.position) +
                   config.social * r2 * (best_position - p.position);
      p.velocity = std::clamp(p.velocity, -v_max, v_max);
      p.position = std::clamp(p.position + p.velocity, lo, hi);
    }
    // Barrier: the global best only moves after the whole swarm has stepped.
    for (auto& p : swarm) {
      const auto [n, f] = score(p.position);
      if (f < p.best_fitness) {
        p.best_fitness = f;
        p.best_position = p.position;
      }
      offer(n, p.position, f);
    }
    result.best_trace.push_back(best_fitness);
  }

  result.best_n = best_n;
  result.best_fitness = best_fitness;
  return result;
}

Matrix stack_inputs(std::span<const AlignedSample> samples) {
  if (samples.empty()) return Matrix(0, 0);
  const Index m = samples.front().voltages.size();
  Matrix x(static_cast<Index>(samples.size()), m);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].voltages.size() != m)
      throw Error(ErrorKind::InvalidArgument, "aligned samples have inconsistent widths");
    x.row(static_cast<Index>(i)) = samples[i].voltages.transpose();
  }
  return x;
}

Matrix stack_targets(std::span<const AlignedSample> samples) {
  Matrix t(static_cast<Index>(samples.size()), 3);
  for (std::size_t i = 0; i < samples.size(); ++i)
    t.row(static_cast<Index>(i)) = samples[i].theta_avg.transpose();
  return t;
}

OselmState train_sequential(const HiddenParams& hidden, std::span<const AlignedSample> samples,
                            Index initial_block, Index chunk_size, double ridge) {
  if (chunk_size < 1) throw Error(ErrorKind::InvalidArgument, "chunk size must be >= 1");
  if (initial_block < 1 || static_cast<std::size_t>(initial_block) > samples.size())
    throw Error(ErrorKind::InsufficientData,
                fmt::format("initial block of {} samples needs at least that many, have {}",
                            initial_block, samples.size()));
  const Matrix x = stack_inputs(samples);
  const Matrix t = stack_targets(samples);
  OselmState state =
      oselm_init(hidden, x.topRows(initial_block), t.topRows(initial_block), ridge);
  for (Index start = initial_block; start < x.rows(); start += chunk_size) {
    const Index rows = std::min(chunk_size, x.rows() - start);
    state = oselm_update(std::move(state), x.middleRows(start, rows), t.middleRows(start, rows));
  }
  return state;
}

std::size_t min_calibration_samples(int n_hidden) {
  std::size_t s = 2;
  while (true) {
    const std::size_t fit = s * 4 / 5;
    if (fit >= static_cast<std::size_t>(n_hidden) && s - fit >= 1) return s;
    ++s;
  }
}

double fitness_node_count(std::span<const AlignedSample> calib, int n_hidden, std::uint64_t seed,
                          const FitnessOptions& options) {
  if (n_hidden < 1) throw Error(ErrorKind::InvalidArgument, "n_hidden must be >= 1");
  const std::size_t needed = min_calibration_samples(n_hidden);
  if (calib.size() < needed)
    throw Error(ErrorKind::InsufficientData,
                fmt::format("calibration window has {} samples; {} hidden nodes need at least {}",
                            calib.size(), n_hidden, needed));
  const std::size_t n_fit = calib.size() * 4 / 5;
  const auto fit = calib.first(n_fit);
  const auto val = calib.subspan(n_fit);

  const Index m = calib.front().voltages.size();
  const HiddenParams hidden = init_hidden_params(n_hidden, m, options.activation, seed);
  const Index block =
      std::min<Index>(default_initial_block(n_hidden), static_cast<Index>(n_fit));
  const OselmState state = train_sequential(hidden, fit, block, options.chunk_size, options.ridge);

  const Matrix pred = predict_batch(state.model(), stack_inputs(val));
  double sse = 0.0;
  for (std::size_t i = 0; i < val.size(); ++i) {
    const double e = pred(static_cast<Index>(i), 1) - val[i].theta_avg.y();
    sse += e * e;
  }
  return std::sqrt(sse / static_cast<double>(val.size()));
}

}  // namespace wristangle
