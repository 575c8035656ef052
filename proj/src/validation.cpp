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

#include "gcsim/validation.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "gcsim/allocation.hpp"
#include "gcsim/compression.hpp"
#include "gcsim/harness.hpp"
#include "gcsim/protocol.hpp"
#include "gcsim/rng.hpp"
#include "gcsim/tasks.hpp"

namespace gcsim {
namespace {

Vector random_vector(std::size_t dim, RandomStream& rng) {
  Vector v(dim);
  for (double& x : v) x = rng.normal();
  return v;
}

CheckResult contraction(std::uint64_t seed) {
  constexpr std::size_t kDim = 64;
  RandomStream rng(seed, StreamTag::kProbe, 1);
  std::size_t violations = 0;
  const std::vector<CompressorSpec> specs = {
      CompressorSpec::grouped_sign(kDim, 1), CompressorSpec::grouped_sign(kDim, 4),
      CompressorSpec::sign(kDim),            CompressorSpec::top_k(kDim, 1),
      CompressorSpec::top_k(kDim, kDim / 2), CompressorSpec::top_k(kDim, kDim)};
  for (const auto& spec : specs) {
    const double delta = delta_of(spec);
    for (int n = 0; n < 200; ++n) {
      const Vector x = random_vector(kDim, rng);
      const double err = norm_sq(sub(compress(spec, x, rng), x));
      if (err > delta * norm_sq(x) * (1.0 + 1e-12) + 1e-300) ++violations;
    }
  }
  return {"compressor contraction", violations == 0,
          std::to_string(violations) + " violations"};
}

CheckResult unbiasedness(std::uint64_t seed) {
  constexpr std::size_t kDim = 8;
  constexpr std::size_t kDraws = 20000;
  RandomStream rng(seed, StreamTag::kProbe, 2);
  const Vector x = random_vector(kDim, rng);
  std::size_t bad = 0;
  for (const auto& spec : {CompressorSpec::stochastic_sign(kDim),
                           CompressorSpec::rand_k(kDim, 2)}) {
    Vector sum(kDim, 0.0), sum_sq(kDim, 0.0);
    for (std::size_t n = 0; n < kDraws; ++n) {
      const Vector c = compress(spec, x, rng);
      for (std::size_t j = 0; j < kDim; ++j) {
        sum[j] += c[j];
        sum_sq[j] += c[j] * c[j];
      }
    }
    for (std::size_t j = 0; j < kDim; ++j) {
      const double mean = sum[j] / kDraws;
      const double var = sum_sq[j] / kDraws - mean * mean;
      const double se = std::sqrt(std::max(var, 0.0) / kDraws);
      // Zero-variance coordinates still carry summation rounding.
      const double rounding = kDraws * std::numeric_limits<double>::epsilon() * std::abs(x[j]);
      if (std::abs(mean - x[j]) > 4.0 * se + rounding) ++bad;
    }
  }
  return {"unbiased compressors", bad == 0, std::to_string(bad) + " coordinates off"};
}

CheckResult virtual_sequence(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.devices = 12;
  cfg.subsets = 10;
  cfg.dim = 8;
  cfg.replication = {3};
  cfg.p = 0.3;
  cfg.method = {MethodKind::kCocoEF, CompressorSpec::top_k(8, 2)};
  cfg.iterations = 200;
  cfg.gamma0 = 1e-4;
  cfg.trials = 2;
  cfg.seed = seed;
  cfg.debug_invariants = true;
  try {
    const RunMetrics m = run_experiment(cfg);
    std::ostringstream os;
    os << "max virtual residual " << m.max_residual << ", max encoding residual "
       << m.max_encoding_residual;
    return {"virtual-iterate and encoding identities", true, os.str()};
  } catch (const InvariantViolation& e) {
    return {"virtual-iterate and encoding identities", false, e.what()};
  }
}

bool same_bits(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

bool same_records(const std::vector<IterationRecord>& a,
                  const std::vector<IterationRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.trial != y.trial || x.iteration != y.iteration ||
        x.nonstragglers != y.nonstragglers || !same_bits(x.loss, y.loss) ||
        !same_bits(x.grad_norm_sq, y.grad_norm_sq) || !same_bits(x.qa, y.qa) ||
        !same_bits(x.residual, y.residual) || !same_bits(x.bound, y.bound)) {
      return false;
    }
  }
  return true;
}

CheckResult determinism(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.devices = 6;
  cfg.subsets = 6;
  cfg.dim = 5;
  cfg.replication = {2};
  cfg.method = {MethodKind::kUnbiasedDiff, CompressorSpec::rand_k(5, 2)};
  cfg.iterations = 50;
  cfg.gamma0 = 1e-4;
  cfg.trials = 2;
  cfg.seed = seed;
  const RunMetrics a = run_experiment(cfg);
  const RunMetrics b = run_experiment(cfg);
  const bool same = same_records(a.records, b.records);
  return {"bit-reproducible runs", same,
          same ? std::to_string(a.records.size()) + " records identical"
               : "records differ"};
}

CheckResult balance(std::uint64_t seed) {
  RandomStream rng(seed, StreamTag::kProbe, 3);
  const AllocationMatrix a = uniform_random_allocation(20, 30, 4, rng);
  const PairwiseBalanceStats stats = pairwise_balance_stats(a);
  bool ok = true;
  for (std::size_t k = 0; k < a.subsets(); ++k) ok = ok && stats.counts[k] == 4;
  return {"allocation column sums", ok,
          "max pairwise deviation " + std::to_string(stats.max_deviation)};
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed) {
  return {contraction(seed), unbiasedness(seed), balance(seed),
          virtual_sequence(seed), determinism(seed)};
}

}  // namespace gcsim
