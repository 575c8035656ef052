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

// Device and server steps of compressed gradient coding, with error feedback
// (CocoEF), without it (Coco), and the unbiased baselines.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gcsim/compression.hpp"
#include "gcsim/rng.hpp"
#include "gcsim/vector.hpp"

namespace gcsim {

enum class MethodKind {
  kCocoEF,         // biased compression + error feedback
  kCoco,           // biased compression, error pinned at zero
  kUnbiased,       // unbiased compression of the coded gradient
  kUnbiasedDiff,   // unbiased compression of gradient differences
  kUncompressed,   // plain stochastic gradient coding
};

std::string to_string(MethodKind kind);
MethodKind method_kind_from_string(const std::string& name);

struct MethodSpec {
  MethodKind kind = MethodKind::kCocoEF;
  CompressorSpec compressor;

  /// Throws ConfigError when the compressor does not suit the method.
  void validate() const;
  /// True when gamma is applied on the device before compression.
  bool scales_on_device() const {
    return kind == MethodKind::kCocoEF || kind == MethodKind::kCoco;
  }
  std::string describe() const;
};

struct DeviceState {
  std::vector<std::size_t> subsets;
  Vector error;      // e_i, CocoEF only
  Vector reference;  // h_i, UnbiasedDiff only

  DeviceState(std::vector<std::size_t> held, std::size_t dim)
      : subsets(std::move(held)), error(dim, 0.0), reference(dim, 0.0) {}
};

/// g_i = sum_{k in subsets} grads[k] / (d_k (1 - p)).
/// `grads` holds one gradient per training subset (indexed by k); only the
/// listed subsets are read. Throws ConfigError for p outside [0, 1).
Vector encode_local(std::span<const std::size_t> subsets,
                    std::span<const Vector> grads,
                    std::span<const std::size_t> replication, double p,
                    std::size_t dim);

/// Same, reading subset gradients from a row-major M x D table.
Vector encode_local(std::span<const std::size_t> subsets,
                    std::span<const double> grad_table,
                    std::span<const std::size_t> replication, double p,
                    std::size_t dim);

struct CompressedStep {
  Vector message;
  Vector next_state;  // new error (CocoEF) or new reference (UnbiasedDiff)
};

/// message = C(gamma g + e), new error = gamma g + e - message.
CompressedStep device_step_cocoef(std::span<const double> g,
                                  std::span<const double> error, double gamma,
                                  const CompressorSpec& spec, RandomStream& rng);

/// message = C(g); the server applies gamma.
Vector device_step_unbiased(std::span<const double> g,
                            const CompressorSpec& spec, RandomStream& rng);

/// Reference step alpha = 1 / (omega + 1) of gradient-difference compression.
double reference_step(const CompressorSpec& spec);

/// message = C(g - h), new reference = h + alpha * message with
/// alpha = reference_step(spec). The receiver reconstructs g_hat = h + message
/// and applies the same reference update.
CompressedStep device_step_unbiased_diff(std::span<const double> g,
                                         std::span<const double> reference,
                                         const CompressorSpec& spec,
                                         RandomStream& rng);

struct StragglerDraw {
  /// responded[i] is I_i: true for a non-straggler.
  std::vector<bool> responded;

  std::size_t count_responded() const;
};

/// Independent Bernoulli(1 - p) response indicators.
StragglerDraw sample_stragglers(std::size_t devices, double p, RandomStream& rng);

/// Elementwise sum of the received messages (pairwise tree order, so equal
/// messages from a power-of-two number of devices sum exactly). Empty -> 0.
Vector server_aggregate(std::span<const Vector> messages, std::size_t dim);

/// CocoEF/Coco: theta - aggregate. Other methods: theta - gamma * aggregate.
Vector server_update(std::span<const double> theta,
                     std::span<const double> aggregate, const MethodSpec& method,
                     double gamma);

/// x = theta - sum_i e_i.
Vector virtual_iterate(std::span<const double> theta,
                       std::span<const Vector> errors);

}  // namespace gcsim
