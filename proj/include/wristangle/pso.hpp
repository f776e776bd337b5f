#pragma once

// Particle swarm search over the hidden-node count.
//
// Particles move on the continuous relaxation of [n_min, n_max]; a position is
// scored at its nearest integer and scores are memoized per integer.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wristangle/alignment.hpp"
#include "wristangle/elm.hpp"
#include "wristangle/oselm.hpp"

namespace wristangle {

struct PsoConfig {
  int swarm_size = 10;
  int iterations = 15;
  double inertia = 0.7;
  double cognitive = 1.5;
  double social = 1.5;
  int n_min = 5;
  int n_max = 60;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PsoResult {
  int best_n = 0;
  double best_fitness = 0.0;
  // Global-best fitness after initialization and after each iteration.
  std::vector<double> best_trace;
  // Distinct node counts in the order they were first evaluated.
  std::vector<int> evaluated;
};

using NodeCountFitness = std::function<double(int)>;

PsoResult pso_search(const NodeCountFitness& fitness, const PsoConfig& config);

struct FitnessOptions {
  Activation activation = Activation::Sigmoid;
  double ridge = kDefaultRidge;
  Index chunk_size = 1;
};

// Smallest calibration set that leaves at least n samples on the 80% side of
// the split and at least one validation sample.
std::size_t min_calibration_samples(int n_hidden);

/// Trains an OSELM with n hidden nodes (hidden layer drawn from `seed`) on the
/// first 80% of the calibration samples and returns the theta_y RMSE, in
/// degrees, on the remaining 20%.
double fitness_node_count(std::span<const AlignedSample> calib, int n_hidden, std::uint64_t seed,
                          const FitnessOptions& options = {});

// Stacks sample voltages / angle labels into row-per-sample matrices.
Matrix stack_inputs(std::span<const AlignedSample> samples);
Matrix stack_targets(std::span<const AlignedSample> samples);

// Initializes on the first `initial_block` samples, then updates in chunks.
OselmState train_sequential(const HiddenParams& hidden, std::span<const AlignedSample> samples,
                            Index initial_block, Index chunk_size, double ridge);

}  // namespace wristangle
