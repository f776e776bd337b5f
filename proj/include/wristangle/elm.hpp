#pragma once

// Random-feature single-hidden-layer network (extreme learning machine).
//
// The hidden layer maps an m-dimensional input row x to N features
// activation(a_j . x + b_j); only the N x d output weights beta are fitted,
// by linear least squares. Matrices are Eigen dense doubles; sample sets are
// stored one sample per row.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wristangle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class Activation : std::uint8_t { Sigmoid = 0, Tanh = 1 };

const char* to_string(Activation a) noexcept;
Activation activation_from_string(std::string_view name);

// Input weights (one row per hidden node) and biases of the hidden layer.
class HiddenParams {
 public:
  HiddenParams(Matrix weights, Vector biases, Activation activation);

  const Matrix& weights() const noexcept { return weights_; }
  const Vector& biases() const noexcept { return biases_; }
  Activation activation() const noexcept { return activation_; }
  Index n_hidden() const noexcept { return weights_.rows(); }
  Index n_inputs() const noexcept { return weights_.cols(); }

  bool operator==(const HiddenParams&) const = default;

 private:
  Matrix weights_;
  Vector biases_;
  Activation activation_;
};

// Hidden layer plus fitted output weights (n_hidden x output_dim).
class ElmModel {
 public:
  ElmModel(HiddenParams hidden, Matrix beta);

  const HiddenParams& hidden() const noexcept { return hidden_; }
  const Matrix& beta() const noexcept { return beta_; }
  Index n_inputs() const noexcept { return hidden_.n_inputs(); }
  Index output_dim() const noexcept { return beta_.cols(); }

  bool operator==(const ElmModel&) const = default;

 private:
  HiddenParams hidden_;
  Matrix beta_;
};

/// Draws weights and biases independently from U[-1, 1). Identical arguments
/// give bitwise-identical parameters.
HiddenParams init_hidden_params(Index n_hidden, Index n_inputs, Activation activation,
                                std::uint64_t seed);

/// Hidden-layer output matrix, N_s x N, for inputs given one sample per row.
Matrix hidden_matrix(const HiddenParams& params, const Matrix& inputs);

/// Minimum-norm least-squares solution of H beta = targets, via a complete
/// orthogonal decomposition of H.
Matrix batch_fit(const Matrix& hidden, const Matrix& targets);

Vector predict(const ElmModel& model, const Vector& input);

// Row-wise prediction of a whole batch.
Matrix predict_batch(const ElmModel& model, const Matrix& inputs);

// Model container, little-endian:
//   "WELM" | u32 version | u8 activation | u32 n_hidden | u32 n_inputs |
//   u32 output_dim | f64 weights[n_hidden*n_inputs] (row-major) |
//   f64 biases[n_hidden] | f64 beta[n_hidden*output_dim] (row-major)
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<std::uint8_t> save_model(const ElmModel& model);
ElmModel load_model(std::span<const std::uint8_t> bytes);

void write_model_file(const std::filesystem::path& path, const ElmModel& model);
ElmModel read_model_file(const std::filesystem::path& path);

}  // namespace wristangle
