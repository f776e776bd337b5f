#pragma once

// Test-only oracles. These recompute results by independent routes (scalar
// loops, direct inverses, augmented least squares) and must not call into the
// code paths they check.

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"
#include "wristangle/elm.hpp"
#include "wristangle/error.hpp"

namespace testing {

using wristangle::Index;
using wristangle::Matrix;

// Hidden-layer matrix entry by entry.
inline Matrix scalar_hidden_matrix(const wristangle::HiddenParams& p, const Matrix& x) {
  Matrix h(x.rows(), p.n_hidden());
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < p.n_hidden(); ++j) {
      double z = p.biases()(j);
      for (Index k = 0; k < x.cols(); ++k) z += p.weights()(j, k) * x(i, k);
      h(i, j) = p.activation() == wristangle::Activation::Tanh ? std::tanh(z)
                                                               : 1.0 / (1.0 + std::exp(-z));
    }
  }
  return h;
}

// Ridge least squares as an ordinary least-squares problem on the augmented
// system [H; sqrt(l) I] beta = [T; 0], solved by Householder QR.
inline Matrix ridge_batch_solve(const Matrix& h, const Matrix& t, double ridge) {
  const Index n = h.cols();
  Matrix a(h.rows() + n, n);
  a << h, std::sqrt(ridge) * Matrix::Identity(n, n);
  Matrix b(t.rows() + n, t.cols());
  b << t, Matrix::Zero(n, t.cols());
  return a.colPivHouseholderQr().solve(b);
}

inline Matrix gram_with_ridge(const Matrix& h, double ridge) {
  Matrix k = h.transpose() * h;
  k.diagonal().array() += ridge;
  return k;
}

inline double rel_frobenius(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

inline Matrix uniform_matrix(Index rows, Index cols, std::mt19937_64& rng, double lo = -1.0,
                             double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

// Kind of the wristangle::Error thrown by fn; fails the test if nothing is thrown.
template <typename Fn>
wristangle::ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const wristangle::Error& e) {
    return e.kind();
  }
  FAIL("expected wristangle::Error");
  return wristangle::ErrorKind::Io;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  auto dir = std::filesystem::temp_directory_path() /
             ("wristangle_" + name + "_" + std::to_string(stamp) + "_" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
