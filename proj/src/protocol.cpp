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

#include "gcsim/protocol.hpp"

namespace gcsim {
namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ConfigError("straggler probability must lie in [0, 1); got " +
                      std::to_string(p));
  }
}

// Recursive halving.
Vector tree_sum(std::span<const Vector> messages) {
  if (messages.size() == 1) return messages.front();
  const std::size_t half = messages.size() / 2;
  Vector left = tree_sum(messages.first(half));
  const Vector right = tree_sum(messages.subspan(half));
  for (std::size_t j = 0; j < left.size(); ++j) left[j] += right[j];
  return left;
}

}  // namespace

std::string to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::kCocoEF: return "cocoef";
    case MethodKind::kCoco: return "coco";
    case MethodKind::kUnbiased: return "unbiased";
    case MethodKind::kUnbiasedDiff: return "unbiased_diff";
    case MethodKind::kUncompressed: return "uncompressed";
  }
  return "unknown";
}

MethodKind method_kind_from_string(const std::string& name) {
  if (name == "cocoef") return MethodKind::kCocoEF;
  if (name == "coco") return MethodKind::kCoco;
  if (name == "unbiased") return MethodKind::kUnbiased;
  if (name == "unbiased_diff") return MethodKind::kUnbiasedDiff;
  if (name == "uncompressed") return MethodKind::kUncompressed;
  throw ConfigError("unknown method '" + name + "'");
}

void MethodSpec::validate() const {
  switch (kind) {
    case MethodKind::kCocoEF:
    case MethodKind::kCoco:
      if (!compressor.is_biased()) {
        throw ConfigError(to_string(kind) +
                          " requires a biased or identity compressor, got " +
                          compressor.describe());
      }
      break;
    case MethodKind::kUnbiased:
    case MethodKind::kUnbiasedDiff:
      if (!compressor.is_unbiased()) {
        throw ConfigError(to_string(kind) +
                          " requires an unbiased or identity compressor, got " +
                          compressor.describe());
      }
      break;
    case MethodKind::kUncompressed:
      if (compressor.kind != CompressorKind::kIdentity) {
        throw ConfigError("uncompressed method takes the identity compressor");
      }
      break;
  }
}

std::string MethodSpec::describe() const {
  return to_string(kind) + "/" + compressor.describe();
}

Vector encode_local(std::span<const std::size_t> subsets,
                    std::span<const Vector> grads,
                    std::span<const std::size_t> replication, double p,
                    std::size_t dim) {
  check_probability(p);
  Vector g(dim, 0.0);
  for (std::size_t k : subsets) {
    require_same_dim(grads[k].size(), dim, "encode_local");
    const double coeff = 1.0 / (static_cast<double>(replication[k]) * (1.0 - p));
    axpy(coeff, grads[k], g);
  }
  return g;
}

Vector encode_local(std::span<const std::size_t> subsets,
                    std::span<const double> grad_table,
                    std::span<const std::size_t> replication, double p,
                    std::size_t dim) {
  check_probability(p);
  Vector g(dim, 0.0);
  for (std::size_t k : subsets) {
    const double coeff = 1.0 / (static_cast<double>(replication[k]) * (1.0 - p));
    axpy(coeff, grad_table.subspan(k * dim, dim), g);
  }
  return g;
}

CompressedStep device_step_cocoef(std::span<const double> g,
                                  std::span<const double> error, double gamma,
                                  const CompressorSpec& spec, RandomStream& rng) {
  require_same_dim(g.size(), error.size(), "device_step_cocoef");
  Vector corrected(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) corrected[j] = gamma * g[j] + error[j];
  CompressedStep step;
  step.message = compress(spec, corrected, rng);
  step.next_state = sub(corrected, step.message);
  return step;
}

Vector device_step_unbiased(std::span<const double> g, const CompressorSpec& spec,
                            RandomStream& rng) {
  if (!spec.is_unbiased()) {
    throw ConfigError("unbiased step requires an unbiased compressor, got " +
                      spec.describe());
  }
  return compress(spec, g, rng);
}

double reference_step(const CompressorSpec& spec) {
  return 1.0 / (variance_parameter(spec) + 1.0);
}

CompressedStep device_step_unbiased_diff(std::span<const double> g,
                                         std::span<const double> reference,
                                         const CompressorSpec& spec,
                                         RandomStream& rng) {
  if (!spec.is_unbiased()) {
    throw ConfigError("difference step requires an unbiased compressor, got " +
                      spec.describe());
  }
  require_same_dim(g.size(), reference.size(), "device_step_unbiased_diff");
  CompressedStep step;
  step.message = compress(spec, sub(g, reference), rng);
  step.next_state = Vector(reference.begin(), reference.end());
  axpy(reference_step(spec), step.message, step.next_state);
  return step;
}

std::size_t StragglerDraw::count_responded() const {
  std::size_t n = 0;
  for (bool r : responded) n += r ? 1 : 0;
  return n;
}

StragglerDraw sample_stragglers(std::size_t devices, double p, RandomStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError("straggler probability must lie in [0, 1]");
  }
  StragglerDraw draw;
  draw.responded.resize(devices);
  for (std::size_t i = 0; i < devices; ++i) draw.responded[i] = rng.bernoulli(1.0 - p);
  return draw;
}

Vector server_aggregate(std::span<const Vector> messages, std::size_t dim) {
  if (messages.empty()) return zeros(dim);
  for (const auto& m : messages) require_same_dim(m.size(), dim, "server_aggregate");
  return tree_sum(messages);
}

Vector server_update(std::span<const double> theta,
                     std::span<const double> aggregate, const MethodSpec& method,
                     double gamma) {
  require_same_dim(theta.size(), aggregate.size(), "server_update");
  Vector next(theta.begin(), theta.end());
  if (method.scales_on_device()) {
    for (std::size_t j = 0; j < next.size(); ++j) next[j] -= aggregate[j];
  } else {
    for (std::size_t j = 0; j < next.size(); ++j) next[j] -= gamma * aggregate[j];
  }
  return next;
}

Vector virtual_iterate(std::span<const double> theta,
                       std::span<const Vector> errors) {
  Vector x(theta.begin(), theta.end());
  for (const auto& e : errors) {
    require_same_dim(e.size(), x.size(), "virtual_iterate");
    for (std::size_t j = 0; j < x.size(); ++j) x[j] -= e[j];
  }
  return x;
}

}  // namespace gcsim
