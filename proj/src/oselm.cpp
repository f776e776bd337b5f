#include "wristangle/oselm.hpp"

#include <algorithm>
#include <cstring>

#include <fmt/format.h>

#include "binary_io.hpp"
#include "wristangle/error.hpp"

namespace wristangle {

namespace {

constexpr char kStateMagic[4] = {'W', 'O', 'S', 'L'};
constexpr std::uint32_t kStateFormatVersion = 1;

// Reciprocal condition estimate below which K is treated as singular.
constexpr double kMinRcond = 1e-15;

void check_chunk(const HiddenParams& hidden, Index output_dim, const Matrix& inputs,
                 const Matrix& targets) {
  if (inputs.rows() < 1) throw Error(ErrorKind::InvalidArgument, "empty chunk");
  if (inputs.cols() != hidden.n_inputs())
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("chunk has {} input columns, expected {}", inputs.cols(),
                            hidden.n_inputs()));
  if (targets.rows() != inputs.rows() || (output_dim > 0 && targets.cols() != output_dim))
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("chunk targets are {}x{}, inputs have {} rows (output_dim {})",
                            targets.rows(), targets.cols(), inputs.rows(), output_dim));
  if (!inputs.allFinite() || !targets.allFinite())
    throw Error(ErrorKind::InvalidArgument, "chunk contains non-finite values");
}

}  // namespace

Index default_initial_block(Index n_hidden) noexcept {
  return std::max(2 * n_hidden, n_hidden + 5);
}

OselmState::OselmState(HiddenParams hidden, Matrix beta, Matrix m_inv, double ridge,
                       std::uint64_t chunks_seen, std::uint64_t samples_seen)
    : hidden_(std::move(hidden)),
      beta_(std::move(beta)),
      m_inv_(std::move(m_inv)),
      ridge_(ridge),
      chunks_seen_(chunks_seen),
      samples_seen_(samples_seen) {
  const Index n = hidden_.n_hidden();
  if (beta_.rows() != n || beta_.cols() < 1)
    throw Error(ErrorKind::InvalidArgument, "OSELM beta has wrong shape");
  if (m_inv_.rows() != n || m_inv_.cols() != n)
    throw Error(ErrorKind::InvalidArgument, "OSELM inverse covariance has wrong shape");
  if (!(ridge_ >= 0.0)) throw Error(ErrorKind::InvalidArgument, "ridge must be >= 0");
  if (!beta_.allFinite() || !m_inv_.allFinite())
    throw Error(ErrorKind::Conditioning, "OSELM state has non-finite entries");
}

OselmState oselm_init(const HiddenParams& params, const Matrix& inputs, const Matrix& targets,
                      double ridge) {
  check_chunk(params, 0, inputs, targets);
  if (targets.cols() < 1) throw Error(ErrorKind::InvalidArgument, "targets need >= 1 column");
  if (!(ridge >= 0.0)) throw Error(ErrorKind::InvalidArgument, "ridge must be >= 0");
  const Index n = params.n_hidden();
  if (inputs.rows() < n)
    throw Error(ErrorKind::Conditioning,
                fmt::format("ill-conditioned initialization: initial block has {} samples for {} "
                            "hidden nodes; use a larger initial block or fewer hidden nodes",
                            inputs.rows(), n));

  const Matrix h = hidden_matrix(params, inputs);
  Matrix k = h.transpose() * h;
  k.diagonal().array() += ridge;

  Eigen::LDLT<Matrix> ldlt(k);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < kMinRcond)
    throw Error(ErrorKind::Conditioning,
                fmt::format("ill-conditioned initialization (rcond {:.3g}); use a larger initial "
                            "block or fewer hidden nodes",
                            ldlt.rcond()));
  Matrix m_inv = ldlt.solve(Matrix::Identity(n, n));
  m_inv = (0.5 * (m_inv + m_inv.transpose())).eval();
  Matrix beta = m_inv * (h.transpose() * targets);
  return OselmState(params, std::move(beta), std::move(m_inv), ridge, 1,
                    static_cast<std::uint64_t>(inputs.rows()));
}

OselmState oselm_update(OselmState state, const Matrix& inputs, const Matrix& targets) {
  check_chunk(state.hidden_, state.beta_.cols(), inputs, targets);
  const Matrix h = hidden_matrix(state.hidden_, inputs);
  const Index rows = h.rows();

  // P = M H^T (N x N_k); S = I + H M H^T (N_k x N_k), symmetric positive definite.
  const Matrix p = state.m_inv_ * h.transpose();
  Matrix s = h * p;
  s.diagonal().array() += 1.0;
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::Conditioning, "OSELM update: inner matrix is numerically singular");

  state.m_inv_.noalias() -= p * llt.solve(p.transpose());
  state.m_inv_ = (0.5 * (state.m_inv_ + state.m_inv_.transpose())).eval();

  const Matrix residual = targets - h * state.beta_;
  state.beta_.noalias() += state.m_inv_ * (h.transpose() * residual);

  if (!state.m_inv_.allFinite() || !state.beta_.allFinite())
    throw Error(ErrorKind::Conditioning, "OSELM update produced non-finite values");
  state.chunks_seen_ += 1;
  state.samples_seen_ += static_cast<std::uint64_t>(rows);
  return state;
}

std::vector<std::uint8_t> save_state(const OselmState& state) {
  detail::ByteWriter w;
  w.bytes(kStateMagic, sizeof kStateMagic);
  w.u32(kStateFormatVersion);
  detail::write_model_body(w, state.model());
  w.f64(state.ridge());
  w.u64(state.chunks_seen());
  w.u64(state.samples_seen());
  w.matrix(state.m_inv());
  return w.take();
}

OselmState load_state(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  char magic[4];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kStateMagic, sizeof magic) != 0)
    throw Error(ErrorKind::Decode, "not an OSELM state file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kStateFormatVersion)
    throw Error(ErrorKind::UnsupportedVersion,
                fmt::format("unsupported OSELM state version {}", version));
  ElmModel model = detail::read_model_body(r);
  const double ridge = r.f64();
  const std::uint64_t chunks = r.u64();
  const std::uint64_t samples = r.u64();
  const Index n = model.hidden().n_hidden();
  Matrix m_inv = r.matrix(n, n);
  if (r.remaining() != 0) throw Error(ErrorKind::Decode, "trailing bytes after OSELM state");
  try {
    return OselmState(model.hidden(), model.beta(), std::move(m_inv), ridge, chunks, samples);
  } catch (const Error& e) {
    throw Error(ErrorKind::Decode, e.what());
  }
}

}  // namespace wristangle
