#include "wristangle/elm.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include <fmt/format.h>

#include "binary_io.hpp"
#include "wristangle/error.hpp"

namespace wristangle {

namespace {

constexpr char kMagic[4] = {'W', 'E', 'L', 'M'};

double activate(Activation a, double z) noexcept {
  switch (a) {
    case Activation::Tanh: return std::tanh(z);
    case Activation::Sigmoid: break;
  }
  return 1.0 / (1.0 + std::exp(-z));
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite())
    throw Error(ErrorKind::InvalidArgument, fmt::format("{} contains non-finite entries", what));
}

}  // namespace

const char* to_string(Activation a) noexcept {
  return a == Activation::Tanh ? "tanh" : "sigmoid";
}

Activation activation_from_string(std::string_view name) {
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "tanh") return Activation::Tanh;
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown activation '{}'", name));
}

HiddenParams::HiddenParams(Matrix weights, Vector biases, Activation activation)
    : weights_(std::move(weights)), biases_(std::move(biases)), activation_(activation) {
  if (weights_.rows() < 1 || weights_.cols() < 1)
    throw Error(ErrorKind::InvalidArgument, "hidden layer needs n_hidden >= 1 and n_inputs >= 1");
  if (biases_.size() != weights_.rows())
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("bias count {} does not match n_hidden {}", biases_.size(),
                            weights_.rows()));
  if (activation_ != Activation::Sigmoid && activation_ != Activation::Tanh)
    throw Error(ErrorKind::InvalidArgument, "unknown activation tag");
  require_finite(weights_, "hidden weights");
  require_finite(biases_, "hidden biases");
}

ElmModel::ElmModel(HiddenParams hidden, Matrix beta)
    : hidden_(std::move(hidden)), beta_(std::move(beta)) {
  if (beta_.rows() != hidden_.n_hidden())
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("output weights have {} rows, expected n_hidden = {}", beta_.rows(),
                            hidden_.n_hidden()));
  if (beta_.cols() < 1) throw Error(ErrorKind::InvalidArgument, "output dimension must be >= 1");
  require_finite(beta_, "output weights");
}

HiddenParams init_hidden_params(Index n_hidden, Index n_inputs, Activation activation,
                                std::uint64_t seed) {
  if (n_hidden < 1 || n_inputs < 1)
    throw Error(ErrorKind::InvalidArgument, "n_hidden and n_inputs must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix weights(n_hidden, n_inputs);
  for (Index j = 0; j < n_hidden; ++j)
    for (Index k = 0; k < n_inputs; ++k) weights(j, k) = unit(rng);
  Vector biases(n_hidden);
  for (Index j = 0; j < n_hidden; ++j) biases(j) = unit(rng);
  return HiddenParams(std::move(weights), std::move(biases), activation);
}

Matrix hidden_matrix(const HiddenParams& params, const Matrix& inputs) {
  if (inputs.cols() != params.n_inputs())
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("input has {} columns, hidden layer expects {}", inputs.cols(),
                            params.n_inputs()));
  require_finite(inputs, "inputs");
  Matrix h = inputs * params.weights().transpose();
  h.rowwise() += params.biases().transpose();
  const Activation a = params.activation();
  return h.unaryExpr([a](double z) { return activate(a, z); });
}

Matrix batch_fit(const Matrix& hidden, const Matrix& targets) {
  if (hidden.rows() < 1) throw Error(ErrorKind::InvalidArgument, "batch_fit needs >= 1 sample");
  if (targets.rows() != hidden.rows())
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("{} target rows for {} hidden rows", targets.rows(), hidden.rows()));
  require_finite(hidden, "hidden matrix");
  require_finite(targets, "targets");
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(hidden);
  return cod.solve(targets);
}

Vector predict(const ElmModel& model, const Vector& input) {
  if (input.size() != model.n_inputs())
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("input length {} does not match model n_inputs {}", input.size(),
                            model.n_inputs()));
  const Matrix h = hidden_matrix(model.hidden(), input.transpose());
  return (h * model.beta()).transpose();
}

Matrix predict_batch(const ElmModel& model, const Matrix& inputs) {
  return hidden_matrix(model.hidden(), inputs) * model.beta();
}

namespace detail {

void write_model_body(ByteWriter& w, const ElmModel& model) {
  const HiddenParams& h = model.hidden();
  w.u8(static_cast<std::uint8_t>(h.activation()));
  w.u32(static_cast<std::uint32_t>(h.n_hidden()));
  w.u32(static_cast<std::uint32_t>(h.n_inputs()));
  w.u32(static_cast<std::uint32_t>(model.output_dim()));
  w.matrix(h.weights());
  w.matrix(h.biases());
  w.matrix(model.beta());
}

ElmModel read_model_body(ByteReader& r) {
  const std::uint8_t tag = r.u8();
  if (tag > static_cast<std::uint8_t>(Activation::Tanh))
    throw Error(ErrorKind::Decode, fmt::format("unknown activation tag {}", tag));
  const Index n_hidden = r.u32();
  const Index n_inputs = r.u32();
  const Index output_dim = r.u32();
  if (n_hidden == 0 || n_inputs == 0 || output_dim == 0)
    throw Error(ErrorKind::Decode, "zero dimension in model header");
  Matrix weights = r.matrix(n_hidden, n_inputs);
  Vector biases = r.matrix(n_hidden, 1);
  Matrix beta = r.matrix(n_hidden, output_dim);
  try {
    return ElmModel(HiddenParams(std::move(weights), std::move(biases),
                                 static_cast<Activation>(tag)),
                    std::move(beta));
  } catch (const Error& e) {
    throw Error(ErrorKind::Decode, e.what());
  }
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot open '{}' for writing", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, fmt::format("write to '{}' failed", path.string()));
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open '{}'", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

std::vector<std::uint8_t> save_model(const ElmModel& model) {
  detail::ByteWriter w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kModelFormatVersion);
  detail::write_model_body(w, model);
  return w.take();
}

ElmModel load_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  char magic[4];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw Error(ErrorKind::Decode, "not a model file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion)
    throw Error(ErrorKind::UnsupportedVersion,
                fmt::format("unsupported model format version {} (expected {})", version,
                            kModelFormatVersion));
  ElmModel model = detail::read_model_body(r);
  if (r.remaining() != 0)
    throw Error(ErrorKind::Decode, fmt::format("{} trailing bytes after model", r.remaining()));
  return model;
}

void write_model_file(const std::filesystem::path& path, const ElmModel& model) {
  detail::write_bytes(path, save_model(model));
}

ElmModel read_model_file(const std::filesystem::path& path) {
  return load_model(detail::read_bytes(path));
}

}  // namespace wristangle
