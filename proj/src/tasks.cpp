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

#include "gcsim/tasks.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "gcsim/errors.hpp"
#include "gcsim/format.hpp"

namespace gcsim {

LinearRegressionTask::LinearRegressionTask(std::size_t dim,
                                           std::vector<double> features,
                                           Vector labels, Vector theta_true)
    : dim_(dim),
      features_(std::move(features)),
      labels_(std::move(labels)),
      theta_true_(std::move(theta_true)) {
  if (dim_ < 1 || labels_.empty()) {
    throw ConfigError("task: need D >= 1 and M >= 1");
  }
  if (features_.size() != labels_.size() * dim_) {
    throw ConfigError("task: feature matrix is not M x D");
  }
  if (!theta_true_.empty()) require_same_dim(theta_true_.size(), dim_, "task");
}

void LinearRegressionTask::check_theta(std::span<const double> theta) const {
  require_same_dim(theta.size(), dim_, "linear regression");
}

double LinearRegressionTask::residual(std::size_t k,
                                      std::span<const double> theta) const {
  return dot(theta, feature(k)) - labels_[k];
}

double LinearRegressionTask::subset_loss(std::size_t k,
                                         std::span<const double> theta) const {
  const double r = residual(k, theta);
  return 0.5 * r * r;
}

Vector LinearRegressionTask::subset_gradient(std::size_t k,
                                             std::span<const double> theta) const {
  if (k >= subsets()) {
    throw ConfigError("subset index " + std::to_string(k) + " out of range [0, " +
                      std::to_string(subsets()) + ")");
  }
  check_theta(theta);
  const double r = residual(k, theta);
  const auto z = feature(k);
  Vector g(dim_);
  for (std::size_t j = 0; j < dim_; ++j) g[j] = r * z[j];
  return g;
}

std::vector<double> LinearRegressionTask::subset_gradients(
    std::span<const double> theta) const {
  check_theta(theta);
  std::vector<double> out(features_.size());
  for (std::size_t k = 0; k < subsets(); ++k) {
    const double r = residual(k, theta);
    const auto z = feature(k);
    double* row = out.data() + k * dim_;
    for (std::size_t j = 0; j < dim_; ++j) row[j] = r * z[j];
  }
  return out;
}

double LinearRegressionTask::loss(std::span<const double> theta) const {
  check_theta(theta);
  double total = 0.0;
  for (std::size_t k = 0; k < subsets(); ++k) total += subset_loss(k, theta);
  return total;
}

Vector LinearRegressionTask::full_gradient(std::span<const double> theta) const {
  check_theta(theta);
  Vector g(dim_, 0.0);
  for (std::size_t k = 0; k < subsets(); ++k) {
    const double r = residual(k, theta);
    const auto z = feature(k);
    for (std::size_t j = 0; j < dim_; ++j) g[j] += r * z[j];
  }
  return g;
}

LinearRegressionTask generate_synthetic(std::size_t subsets, std::size_t dim,
                                        RandomStream& rng) {
  if (subsets < 1 || dim < 1) throw ConfigError("task: need M >= 1 and D >= 1");
  constexpr double kFeatureStddev = 10.0;  // variance 100
  Vector theta_true(dim);
  for (double& v : theta_true) v = rng.normal();
  std::vector<double> features(subsets * dim);
  for (double& v : features) v = rng.normal(0.0, kFeatureStddev);
  Vector labels(subsets);
  for (std::size_t k = 0; k < subsets; ++k) {
    const std::span<const double> z(features.data() + k * dim, dim);
    labels[k] = rng.normal(dot(z, theta_true), 1.0);
  }
  return LinearRegressionTask(dim, std::move(features), std::move(labels),
                              std::move(theta_true));
}

void write_task(std::ostream& os, const LinearRegressionTask& task) {
  os << task.dim() << ' ' << task.subsets() << '\n';
  const auto theta = task.theta_true();
  for (std::size_t j = 0; j < theta.size(); ++j) {
    os << (j ? " " : "") << format_double(theta[j]);
  }
  os << '\n';
  for (std::size_t k = 0; k < task.subsets(); ++k) {
    for (double v : task.feature(k)) os << format_double(v) << ' ';
    os << format_double(task.label(k)) << '\n';
  }
}

LinearRegressionTask read_task(std::istream& is) {
  std::size_t dim = 0, subsets = 0;
  if (!(is >> dim >> subsets) || dim == 0 || subsets == 0) {
    throw ConfigError("task file: bad 'D M' header");
  }
  auto next = [&]() {
    std::string token;
    if (!(is >> token)) throw ConfigError("task file: truncated");
    return parse_double(token);
  };
  Vector theta(dim);
  for (double& v : theta) v = next();
  std::vector<double> features(subsets * dim);
  Vector labels(subsets);
  for (std::size_t k = 0; k < subsets; ++k) {
    for (std::size_t j = 0; j < dim; ++j) features[k * dim + j] = next();
    labels[k] = next();
  }
  return LinearRegressionTask(dim, std::move(features), std::move(labels),
                              std::move(theta));
}

}  // namespace gcsim
