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

// Synthetic linear regression: one sample per training subset,
// f_k(theta) = 0.5 (<theta, z_k> - y_k)^2 and F = sum_k f_k.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "gcsim/rng.hpp"
#include "gcsim/vector.hpp"

namespace gcsim {

class LinearRegressionTask {
 public:
  /// features is M rows of length D, row-major.
  LinearRegressionTask(std::size_t dim, std::vector<double> features,
                       Vector labels, Vector theta_true);

  std::size_t dim() const { return dim_; }
  std::size_t subsets() const { return labels_.size(); }
  std::span<const double> feature(std::size_t k) const {
    return {features_.data() + k * dim_, dim_};
  }
  double label(std::size_t k) const { return labels_[k]; }
  std::span<const double> theta_true() const { return theta_true_; }

  /// <theta, z_k> - y_k
  double residual(std::size_t k, std::span<const double> theta) const;
  double subset_loss(std::size_t k, std::span<const double> theta) const;
  /// (<theta, z_k> - y_k) z_k. Throws ConfigError on an out-of-range k.
  Vector subset_gradient(std::size_t k, std::span<const double> theta) const;
  /// All M subset gradients, row-major M x D.
  std::vector<double> subset_gradients(std::span<const double> theta) const;

  double loss(std::span<const double> theta) const;
  /// sum_k subset_gradient(k, theta), accumulated in ascending k.
  Vector full_gradient(std::span<const double> theta) const;

  bool operator==(const LinearRegressionTask&) const = default;

 private:
  void check_theta(std::span<const double> theta) const;

  std::size_t dim_;
  std::vector<double> features_;
  Vector labels_;
  Vector theta_true_;
};

/// z_k ~ N(0, 100 I) (variance 100), theta_true ~ N(0, I),
/// y_k ~ N(<z_k, theta_true>, 1).
LinearRegressionTask generate_synthetic(std::size_t subsets, std::size_t dim,
                                        RandomStream& rng);

/// Text format: "D M" header, theta_true row, then one "z_k... y_k" row per
/// sample. Values are written with shortest round-trip precision.
void write_task(std::ostream& os, const LinearRegressionTask& task);
LinearRegressionTask read_task(std::istream& is);

}  // namespace gcsim
