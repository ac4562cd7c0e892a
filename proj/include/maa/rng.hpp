// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors
//
// Counter-based splittable random stream (Philox-4x64-10). Each (seed,
// stream) pair is an independent, reproducible sequence, so per-realization
// streams can be consumed in any order or in parallel with identical output.

#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace maa::simulate {

// One raw Philox-4x64-10 block: four output words for a (counter, key)
// input. The stream class below is the intended API; the block form exists
// so known-answer vectors can pin the generator bit-for-bit.
std::array<std::uint64_t, 4> philox4x64_block(const std::array<std::uint64_t, 4>& counter,
                                              const std::array<std::uint64_t, 2>& key);

class philox_stream {
 public:
  philox_stream(std::uint64_t seed, std::uint64_t stream);

  // Raw 64-bit word.
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53-bit resolution.
  double next_uniform();

  // Standard normal via Box-Muller (pairs cached).
  double next_normal();

  // Circular complex normal with E|z|^2 = 1 (real/imag parts N(0, 1/2)).
  std::complex<double> next_cn();

 private:
  void refill();

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_{};
  std::array<std::uint64_t, 4> buffer_{};
  unsigned buffer_pos_ = 4;  // empty
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace maa::simulate
