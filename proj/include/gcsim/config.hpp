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

// Declarative experiment description and its flat key = value file format.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gcsim/protocol.hpp"

namespace gcsim {

enum class LrSchedule {
  kConstant,  // gamma_t = gamma0
  kInvSqrt,   // gamma_t = gamma0 / sqrt(t + 1)
};

std::string to_string(LrSchedule schedule);

struct ExperimentConfig {
  std::size_t devices = 100;  // N
  std::size_t subsets = 100;  // M
  std::size_t dim = 100;      // D
  /// Either one replication count for every subset or one per subset.
  std::vector<std::size_t> replication{5};
  double p = 0.2;
  MethodSpec method{MethodKind::kCocoEF, CompressorSpec::sign(100)};
  std::size_t iterations = 1000;  // T
  double gamma0 = 1e-5;
  LrSchedule lr_schedule = LrSchedule::kConstant;
  std::size_t trials = 5;
  std::uint64_t seed = 1;
  bool emit_theory = false;
  bool debug_invariants = false;
  /// Relative tolerance for the runtime identity checks.
  double invariant_tolerance = 1e-9;

  /// d_k for every subset.
  std::vector<std::size_t> replication_per_subset() const;
  double learning_rate(std::size_t t) const;
  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys, duplicate
/// keys and malformed values are ConfigErrors.
///
/// Keys: N M D d p method compressor k group_size groups T gamma0
/// lr_schedule trials seed emit_theory debug_invariants invariant_tolerance.
/// `d` is one integer or a comma list of M integers; `groups` is a
/// ';'-separated list of comma lists of 0-based coordinates.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);
/// Inverse of parse_config.
std::string to_config_text(const ExperimentConfig& config);

}  // namespace gcsim
