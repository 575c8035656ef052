// Copyright 2026 The gcsim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

// Counter-based random streams built on Philox4x32-10.
//
// A stream is identified by a 64-bit key (the run seed) and a 96-bit stream
// id (tag, a, b) stored in the upper three counter words; the lowest counter
// word indexes 128-bit blocks within the stream. Two streams with different
// ids never share a block, so draws are independent of the order in which
// streams are consumed.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace gcsim {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// The Philox4x32 bijection with 10 rounds.
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

enum class StreamTag : std::uint32_t {
  kGeneric = 0,
  kTask = 1,
  kAllocation = 2,
  kInit = 3,
  kStraggler = 4,
  kCompressor = 5,
  kProbe = 6,
};

/// Mixes a root seed and a trial index into an independent 64-bit key.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, StreamTag tag = StreamTag::kGeneric,
                        std::uint32_t a = 0, std::uint32_t b = 0);

  /// A sibling stream under the same key with a different id.
  RandomStream substream(StreamTag tag, std::uint32_t a = 0,
                         std::uint32_t b = 0) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller; the second variate is cached).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  /// True with probability `prob`.
  bool bernoulli(double prob) { return uniform() < prob; }
  /// Uniform integer in [0, n); n must be > 0.
  std::size_t uniform_index(std::size_t n);
  /// k distinct indices from [0, n), in selection order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

  std::uint64_t seed() const { return seed_; }

 private:
  void refill();

  std::uint64_t seed_;
  PhiloxKey key_;
  PhiloxCounter counter_;
  std::array<std::uint32_t, 4> block_{};
  unsigned used_ = 4;
  std::optional<double> cached_normal_;
};

}  // namespace gcsim
