#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "wristangle/elm.hpp"
#include "wristangle/error.hpp"

namespace wristangle::detail {

static_assert(std::endian::native == std::endian::little,
              "binary model format assumes a little-endian host");

class ByteWriter {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { bytes(&v, sizeof v); }

  // Row-major element order regardless of Eigen storage.
  void matrix(const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) f64(m(i, j));
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  void bytes(void* dst, std::size_t n) {
    if (in_.size() - pos_ < n)
      throw Error(ErrorKind::Decode, "truncated payload at byte " + std::to_string(pos_));
    std::memcpy(dst, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, sizeof v);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, sizeof v);
    return v;
  }
  double f64() {
    double v;
    bytes(&v, sizeof v);
    return v;
  }
  Matrix matrix(Index rows, Index cols) {
    if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 8 > remaining())
      throw Error(ErrorKind::Decode, "truncated payload: matrix exceeds remaining bytes");
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = f64();
    return m;
  }

  std::size_t remaining() const noexcept { return in_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

// Encoding / decoding of the ElmModel body shared by the model and
// OSELM-state containers.
void write_model_body(ByteWriter& w, const ElmModel& model);
ElmModel read_model_body(ByteReader& r);

}  // namespace wristangle::detail
