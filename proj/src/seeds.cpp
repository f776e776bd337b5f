#include "wristangle/seeds.hpp"

#include "wristangle/error.hpp"

namespace wristangle {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept {
  // FNV-1a over the tag, then mixed with the parent seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ splitmix64(h));
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::Conditioning: return "conditioning error";
    case ErrorKind::ModelMismatch: return "model mismatch";
    case ErrorKind::Decode: return "decode error";
    case ErrorKind::UnsupportedVersion: return "unsupported version";
    case ErrorKind::Ordering: return "ordering error";
    case ErrorKind::NoEstimates: return "no estimates";
    case ErrorKind::NoOverlap: return "no overlap";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

}  // namespace wristangle
