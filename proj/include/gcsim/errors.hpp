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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gcsim {

/// Invalid or inconsistent user-supplied parameters (dimension mismatch,
/// p = 1, incompatible method/compressor, malformed config file).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical quantity was requested outside the domain where it is
/// defined (zero aggregate for q_A, delta of an unbiased compressor, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by the simulator when a runtime identity check exceeds its
/// tolerance with invariant checking enabled.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(const std::string& what, std::size_t trial,
                     std::size_t iteration, double residual)
      : std::runtime_error(what + " (trial " + std::to_string(trial) +
                           ", iteration " + std::to_string(iteration) +
                           ", residual " + std::to_string(residual) + ")"),
        trial_(trial),
        iteration_(iteration),
        residual_(residual) {}

  std::size_t trial() const { return trial_; }
  std::size_t iteration() const { return iteration_; }
  double residual() const { return residual_; }

 private:
  std::size_t trial_;
  std::size_t iteration_;
  double residual_;
};

}  // namespace gcsim
