#pragma once

// Online sequential ELM: recursive least-squares over chunks of samples.
//
// With K = sum_k H_k^T H_k + ridge * I and M = K^-1, each chunk (H, T) updates
//
//   M    <- M - M H^T (I + H M H^T)^-1 H M
//   beta <- beta + M H^T (T - H beta)
//
// so the state never stores past samples; memory is O(N^2 + N d).

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "wristangle/elm.hpp"

namespace wristangle {

inline constexpr double kDefaultRidge = 1e-6;

// Default initial block size for n hidden nodes: 2n, but never below n + 5.
Index default_initial_block(Index n_hidden) noexcept;

class OselmState {
 public:
  OselmState(HiddenParams hidden, Matrix beta, Matrix m_inv, double ridge,
             std::uint64_t chunks_seen, std::uint64_t samples_seen);

  const HiddenParams& hidden() const noexcept { return hidden_; }
  const Matrix& beta() const noexcept { return beta_; }
  const Matrix& m_inv() const noexcept { return m_inv_; }
  double ridge() const noexcept { return ridge_; }
  std::uint64_t chunks_seen() const noexcept { return chunks_seen_; }
  std::uint64_t samples_seen() const noexcept { return samples_seen_; }

  // Frozen snapshot for prediction.
  ElmModel model() const { return ElmModel(hidden_, beta_); }

  bool operator==(const OselmState&) const = default;

 private:
  friend OselmState oselm_update(OselmState, const Matrix&, const Matrix&);

  HiddenParams hidden_;
  Matrix beta_;
  Matrix m_inv_;
  double ridge_;
  std::uint64_t chunks_seen_;
  std::uint64_t samples_seen_;
};

/// Fits the initial block: M = (H0^T H0 + ridge I)^-1, beta = M H0^T T0.
/// Throws ErrorKind::Conditioning when the block has fewer samples than
/// hidden nodes or K is numerically singular even with the ridge.
OselmState oselm_init(const HiddenParams& params, const Matrix& inputs, const Matrix& targets,
                      double ridge = kDefaultRidge);

/// Folds one chunk of N_k >= 1 samples into the state. The inner inverse is N_k x N_k.
OselmState oselm_update(OselmState state, const Matrix& inputs, const Matrix& targets);

// Resumable-training container: "WOSL" | u32 version | model body (as in the
// model file) | f64 ridge | u64 chunks_seen | u64 samples_seen |
// f64 m_inv[N*N] (row-major)
std::vector<std::uint8_t> save_state(const OselmState& state);
OselmState load_state(std::span<const std::uint8_t> bytes);

}  // namespace wristangle
