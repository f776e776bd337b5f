#pragma once

#include <cstdint>
#include <string_view>

namespace wristangle {

// Deterministically derive an independent sub-seed for a named consumer
// (e.g. "pso", "hidden", "noise") from one top-level seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept;

}  // namespace wristangle
