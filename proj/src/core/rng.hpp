// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
//
// Counter-based generator: draw i of stream (seed, stream_id) is a pure
// function of (seed, stream_id, i), so parallel workers that own distinct
// stream ids never overlap and results do not depend on scheduling.
#pragma once

#include <cstdint>

namespace cifs {

class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return at(counter_++); }
  /// Draw number i of this stream, independent of the internal counter.
  result_type at(std::uint64_t i) const;

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace cifs
