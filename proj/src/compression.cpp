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

#include "gcsim/compression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gcsim {
namespace {

inline double sign_of(double v) {
  if (v > 0.0) return 1.0;
  if (v < 0.0) return -1.0;
  return 0.0;
}

void check_k(std::size_t dim, std::size_t k, const char* who) {
  if (k < 1 || k > dim) {
    throw ConfigError(std::string(who) + ": k must lie in [1, " +
                      std::to_string(dim) + "], got " + std::to_string(k));
  }
}

Vector grouped_sign_bit(const CompressorSpec& spec, std::span<const double> x) {
  Vector out(x.size(), 0.0);
  for (const auto& group : spec.groups) {
    double l1 = 0.0;
    for (std::size_t j : group) l1 += std::abs(x[j]);
    const double magnitude = l1 / static_cast<double>(group.size());
    for (std::size_t j : group) out[j] = sign_of(x[j]) * magnitude;
  }
  return out;
}

Vector top_k(std::size_t k, std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Larger magnitude first; equal magnitudes resolve to the lower index.
  auto before = [&](std::size_t a, std::size_t b) {
    const double ma = std::abs(x[a]);
    const double mb = std::abs(x[b]);
    return ma != mb ? ma > mb : a < b;
  };
  if (k < x.size()) {
    std::nth_element(order.begin(), order.begin() + static_cast<long>(k),
                     order.end(), before);
  }
  Vector out(x.size(), 0.0);
  for (std::size_t i = 0; i < k; ++i) out[order[i]] = x[order[i]];
  return out;
}

Vector stochastic_sign_bit(std::span<const double> x, RandomStream& rng) {
  Vector out(x.size(), 0.0);
  const double scale = norm_inf(x);
  if (scale == 0.0) return out;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double p_plus = 0.5 * (1.0 + x[j] / scale);
    out[j] = rng.uniform() < p_plus ? scale : -scale;
  }
  return out;
}

Vector amplified_rand_k(std::size_t k, std::span<const double> x,
                        RandomStream& rng) {
  Vector out(x.size(), 0.0);
  const double amplify =
      static_cast<double>(x.size()) / static_cast<double>(k);
  for (std::size_t j : rng.sample_without_replacement(x.size(), k)) {
    out[j] = amplify * x[j];
  }
  return out;
}

}  // namespace

std::string to_string(CompressorKind kind) {
  switch (kind) {
    case CompressorKind::kGroupedSignBit: return "sign";
    case CompressorKind::kTopK: return "topk";
    case CompressorKind::kStochasticSignBit: return "stochastic_sign";
    case CompressorKind::kAmplifiedRandK: return "randk";
    case CompressorKind::kIdentity: return "identity";
  }
  return "unknown";
}

CompressorKind compressor_kind_from_string(const std::string& name) {
  if (name == "sign" || name == "grouped_sign") {
    return CompressorKind::kGroupedSignBit;
  }
  if (name == "topk") return CompressorKind::kTopK;
  if (name == "stochastic_sign") return CompressorKind::kStochasticSignBit;
  if (name == "randk") return CompressorKind::kAmplifiedRandK;
  if (name == "identity" || name == "none") return CompressorKind::kIdentity;
  throw ConfigError("unknown compressor '" + name + "'");
}

CompressorSpec CompressorSpec::identity(std::size_t dim) {
  return {CompressorKind::kIdentity, dim, {}, 0};
}

CompressorSpec CompressorSpec::sign(std::size_t dim) {
  return grouped_sign(dim, dim);
}

CompressorSpec CompressorSpec::grouped_sign(std::size_t dim,
                                            std::size_t group_size) {
  if (group_size < 1) throw ConfigError("grouped_sign: group_size must be >= 1");
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t start = 0; start < dim; start += group_size) {
    std::vector<std::size_t> group;
    for (std::size_t j = start; j < std::min(dim, start + group_size); ++j) {
      group.push_back(j);
    }
    groups.push_back(std::move(group));
  }
  return grouped_sign(dim, std::move(groups));
}

CompressorSpec CompressorSpec::grouped_sign(
    std::size_t dim, std::vector<std::vector<std::size_t>> groups) {
  if (dim == 0) throw ConfigError("grouped_sign: dimension must be >= 1");
  std::vector<char> seen(dim, 0);
  std::size_t covered = 0;
  for (auto& group : groups) {
    if (group.empty()) throw ConfigError("grouped_sign: empty group");
    std::sort(group.begin(), group.end());
    for (std::size_t j : group) {
      if (j >= dim) throw ConfigError("grouped_sign: index out of range");
      if (seen[j]) throw ConfigError("grouped_sign: groups overlap");
      seen[j] = 1;
      ++covered;
    }
  }
  if (covered != dim) {
    throw ConfigError("grouped_sign: groups do not cover every coordinate");
  }
  return {CompressorKind::kGroupedSignBit, dim, std::move(groups), 0};
}

CompressorSpec CompressorSpec::top_k(std::size_t dim, std::size_t k) {
  check_k(dim, k, "top_k");
  return {CompressorKind::kTopK, dim, {}, k};
}

CompressorSpec CompressorSpec::stochastic_sign(std::size_t dim) {
  return {CompressorKind::kStochasticSignBit, dim, {}, 0};
}

CompressorSpec CompressorSpec::rand_k(std::size_t dim, std::size_t k) {
  check_k(dim, k, "rand_k");
  return {CompressorKind::kAmplifiedRandK, dim, {}, k};
}

bool CompressorSpec::is_biased() const {
  return kind == CompressorKind::kGroupedSignBit ||
         kind == CompressorKind::kTopK || kind == CompressorKind::kIdentity;
}

bool CompressorSpec::is_unbiased() const {
  return kind == CompressorKind::kStochasticSignBit ||
         kind == CompressorKind::kAmplifiedRandK ||
         kind == CompressorKind::kIdentity;
}

bool CompressorSpec::is_stochastic() const {
  return kind == CompressorKind::kStochasticSignBit ||
         kind == CompressorKind::kAmplifiedRandK;
}

std::string CompressorSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind == CompressorKind::kTopK || kind == CompressorKind::kAmplifiedRandK) {
    os << "(k=" << k << ")";
  } else if (kind == CompressorKind::kGroupedSignBit) {
    os << "(groups=" << groups.size() << ")";
  }
  return os.str();
}

Vector compress(const CompressorSpec& spec, std::span<const double> x,
                RandomStream& rng) {
  require_same_dim(x.size(), spec.dim, "compress");
  switch (spec.kind) {
    case CompressorKind::kGroupedSignBit: return grouped_sign_bit(spec, x);
    case CompressorKind::kTopK: return top_k(spec.k, x);
    case CompressorKind::kStochasticSignBit: return stochastic_sign_bit(x, rng);
    case CompressorKind::kAmplifiedRandK: return amplified_rand_k(spec.k, x, rng);
    case CompressorKind::kIdentity: break;
  }
  return Vector(x.begin(), x.end());
}

double delta_of(const CompressorSpec& spec) {
  switch (spec.kind) {
    case CompressorKind::kIdentity:
      return 0.0;
    case CompressorKind::kTopK:
      return 1.0 - static_cast<double>(spec.k) / static_cast<double>(spec.dim);
    case CompressorKind::kGroupedSignBit: {
      std::size_t largest = 0;
      for (const auto& group : spec.groups) largest = std::max(largest, group.size());
      return 1.0 - 1.0 / static_cast<double>(largest);
    }
    case CompressorKind::kStochasticSignBit:
    case CompressorKind::kAmplifiedRandK:
      break;
  }
  throw DomainError("delta undefined for unbiased compressor " + spec.describe());
}

double variance_parameter(const CompressorSpec& spec) {
  const double dim = static_cast<double>(spec.dim);
  switch (spec.kind) {
    case CompressorKind::kIdentity:
      return 0.0;
    case CompressorKind::kAmplifiedRandK:
      return dim / static_cast<double>(spec.k) - 1.0;
    case CompressorKind::kStochasticSignBit:
      // ||C(x)||^2 = D ||x||_inf^2 <= D ||x||^2
      return dim - 1.0;
    case CompressorKind::kGroupedSignBit:
    case CompressorKind::kTopK:
      break;
  }
  throw DomainError("variance parameter undefined for biased compressor " +
                    spec.describe());
}

double measure_qa(std::span<const Vector> xs, const CompressorSpec& spec,
                  std::size_t trials, RandomStream& rng) {
  if (xs.empty()) throw DomainError("q_A ratio undefined for zero aggregate");
  if (trials < 1) throw ConfigError("measure_qa: trials must be >= 1");
  const std::size_t dim = xs.front().size();
  Vector total(dim, 0.0);
  for (const auto& x : xs) {
    require_same_dim(x.size(), dim, "measure_qa");
    axpy(1.0, x, total);
  }
  const double denom = norm_sq(total);
  if (denom == 0.0) throw DomainError("q_A ratio undefined for zero aggregate");

  const std::size_t rounds = spec.is_stochastic() ? trials : 1;
  double acc = 0.0;
  for (std::size_t r = 0; r < rounds; ++r) {
    Vector residual(dim, 0.0);
    for (const auto& x : xs) {
      const Vector c = compress(spec, x, rng);
      for (std::size_t j = 0; j < dim; ++j) residual[j] += x[j] - c[j];
    }
    acc += norm_sq(residual) / denom;
  }
  return acc / static_cast<double>(rounds);
}

}  // namespace gcsim
