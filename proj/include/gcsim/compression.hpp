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

// Gradient compressors: grouped sign-bit quantization and top-K (biased),
// stochastic 1-bit quantization and amplified rand-K (unbiased), identity.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gcsim/rng.hpp"
#include "gcsim/vector.hpp"

namespace gcsim {

enum class CompressorKind {
  kGroupedSignBit,
  kTopK,
  kStochasticSignBit,
  kAmplifiedRandK,
  kIdentity,
};

std::string to_string(CompressorKind kind);
CompressorKind compressor_kind_from_string(const std::string& name);

/// Tagged description of one compression function over R^dim.
///
/// Build through the named constructors; they validate the group partition
/// and the range of k.
struct CompressorSpec {
  CompressorKind kind = CompressorKind::kIdentity;
  std::size_t dim = 0;
  /// Index groups I_1..I_M0 (grouped sign-bit only). Each group is sorted.
  std::vector<std::vector<std::size_t>> groups;
  /// Kept coordinates (top-K, rand-K only).
  std::size_t k = 0;

  static CompressorSpec identity(std::size_t dim);
  /// Sign-bit quantization with a single group (M0 = 1).
  static CompressorSpec sign(std::size_t dim);
  /// Contiguous groups of `group_size`; a shorter tail group takes the rest.
  static CompressorSpec grouped_sign(std::size_t dim, std::size_t group_size);
  static CompressorSpec grouped_sign(std::size_t dim,
                                     std::vector<std::vector<std::size_t>> groups);
  static CompressorSpec top_k(std::size_t dim, std::size_t k);
  static CompressorSpec stochastic_sign(std::size_t dim);
  static CompressorSpec rand_k(std::size_t dim, std::size_t k);

  /// Biased kinds plus identity (usable with error feedback).
  bool is_biased() const;
  /// Unbiased kinds plus identity.
  bool is_unbiased() const;
  bool is_stochastic() const;

  std::string describe() const;
};

/// Applies the compressor. `rng` is consumed only by the stochastic kinds.
Vector compress(const CompressorSpec& spec, std::span<const double> x,
                RandomStream& rng);

/// Contraction constant delta with ||C(x) - x||^2 <= delta ||x||^2.
/// Throws DomainError for the unbiased kinds.
double delta_of(const CompressorSpec& spec);

/// Variance parameter omega of an unbiased compressor:
/// E ||C(x)||^2 <= (omega + 1) ||x||^2. Identity -> 0, rand-K -> D/k - 1,
/// stochastic sign -> D - 1. Throws DomainError for the biased kinds.
double variance_parameter(const CompressorSpec& spec);

/// Empirical aggregate discrepancy
///   mean over trials of ||sum_i (x_i - C(x_i))||^2 / ||sum_i x_i||^2.
/// Throws DomainError when sum_i x_i = 0.
double measure_qa(std::span<const Vector> xs, const CompressorSpec& spec,
                  std::size_t trials, RandomStream& rng);

}  // namespace gcsim
