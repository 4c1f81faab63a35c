// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#include "rng.hpp"

namespace cifs {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream_id)
    : key_(mix64(mix64(seed + kGamma) ^ mix64(stream_id * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

CounterRng::result_type CounterRng::at(std::uint64_t i) const { return mix64(key_ + (i + 1) * kGamma); }

}  // namespace cifs
