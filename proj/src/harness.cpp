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

#include "gcsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gcsim/compression.hpp"
#include "gcsim/protocol.hpp"
#include "gcsim/rng.hpp"
#include "gcsim/theory.hpp"

namespace gcsim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Heuristic margin on the trajectory heterogeneity estimate for the bound column.
constexpr double kBetaSafetyFactor = 2.0;

double relative_gap(std::span<const double> actual, std::span<const double> expected,
                    double scale) {
  double gap = 0.0;
  for (std::size_t j = 0; j < actual.size(); ++j) {
    gap += (actual[j] - expected[j]) * (actual[j] - expected[j]);
  }
  gap = std::sqrt(gap);
  if (gap == 0.0) return 0.0;
  return gap / std::max(scale, std::numeric_limits<double>::min());
}

Vector sum_of(std::span<const Vector> vs, std::size_t dim) {
  Vector total(dim, 0.0);
  for (const auto& v : vs) axpy(1.0, v, total);
  return total;
}

bool has_error_feedback(const MethodSpec& m) { return m.kind == MethodKind::kCocoEF; }

// Runs in which gradient coding with error feedback (or none needed, for the
// uncompressed method) makes the convergence analysis applicable.
bool theory_applies(const MethodSpec& m) {
  return m.kind == MethodKind::kCocoEF || m.kind == MethodKind::kUncompressed;
}

class TrialRunner {
 public:
  TrialRunner(const ExperimentConfig& cfg, std::size_t trial, RunMetrics& out)
      : cfg_(cfg),
        trial_(trial),
        out_(out),
        setup_(make_trial_setup(cfg, trial)),
        dim_(cfg.dim),
        replication_(setup_.allocation.replication().begin(),
                     setup_.allocation.replication().end()),
        seed_(trial_seed(cfg.seed, trial)) {
    for (std::size_t i = 0; i < cfg.devices; ++i) {
      const auto held = setup_.allocation.device_subsets(i);
      devices_.emplace_back(std::vector<std::size_t>(held.begin(), held.end()), dim_);
    }
    server_reference_.assign(cfg.devices, zeros(dim_));
  }

  void run() {
    const auto& task = setup_.task;
    Vector theta = setup_.theta0;
    const std::size_t first = out_.records.size();
    TrialTheory theory;
    double beta_seen = 0.0;
    double qa_max = 0.0;
    double error_energy = 0.0;
    double sum_grad = 0.0;

    for (std::size_t t = 0; t < cfg_.iterations; ++t) {
      const double gamma = cfg_.learning_rate(t);
      const auto grads = task.subset_gradients(theta);
      Vector full(dim_, 0.0);
      for (std::size_t k = 0; k < cfg_.subsets; ++k) {
        axpy(1.0, std::span<const double>(grads).subspan(k * dim_, dim_), full);
      }

      IterationRecord rec;
      rec.trial = trial_;
      rec.iteration = t;
      rec.loss = task.loss(theta);
      rec.grad_norm_sq = norm_sq(full);
      rec.qa = kNaN;
      rec.residual = kNaN;
      rec.bound = kNaN;
      if (!std::isfinite(rec.loss)) {
        throw InvariantViolation("loss is not finite", trial_, t, rec.loss);
      }
      if (t == 0) theory.F0 = rec.loss;
      sum_grad += rec.grad_norm_sq;
      if (cfg_.emit_theory) {
        beta_seen = std::max(beta_seen, theory::heterogeneity_at(grads, full, cfg_.subsets));
      }
      if (cfg_.debug_invariants) check_encoding(grads, full, t);

      RandomStream straggler_rng(seed_, StreamTag::kStraggler,
                                 static_cast<std::uint32_t>(t));
      const StragglerDraw draw = sample_stragglers(cfg_.devices, cfg_.p, straggler_rng);
      rec.nonstragglers = draw.count_responded();

      const bool track_virtual = has_error_feedback(cfg_.method);
      Vector x_before;
      if (track_virtual) x_before = virtual_iterate(theta, errors());

      std::vector<Vector> messages;
      Vector coded_sum(dim_, 0.0);    // sum_i I_i g_i
      Vector input_sum(dim_, 0.0);    // sum_i I_i (gamma g_i + e_i)
      Vector residue_sum(dim_, 0.0);  // sum_i I_i (input_i - C(input_i))
      for (std::size_t i = 0; i < cfg_.devices; ++i) {
        if (!draw.responded[i]) continue;  // stragglers compute nothing
        DeviceState& dev = devices_[i];
        const Vector g = encode_local(dev.subsets, grads, replication_, cfg_.p, dim_);
        axpy(1.0, g, coded_sum);
        RandomStream rng(seed_, StreamTag::kCompressor, static_cast<std::uint32_t>(i),
                         static_cast<std::uint32_t>(t));
        switch (cfg_.method.kind) {
          case MethodKind::kCocoEF:
          case MethodKind::kCoco: {
            // Coco keeps e_i = 0 throughout.
            CompressedStep step =
                device_step_cocoef(g, dev.error, gamma, cfg_.method.compressor, rng);
            for (std::size_t j = 0; j < dim_; ++j) {
              input_sum[j] += gamma * g[j] + dev.error[j];
            }
            axpy(1.0, step.next_state, residue_sum);
            if (cfg_.method.kind == MethodKind::kCocoEF) dev.error = std::move(step.next_state);
            messages.push_back(std::move(step.message));
            break;
          }
          case MethodKind::kUnbiased:
            messages.push_back(device_step_unbiased(g, cfg_.method.compressor, rng));
            break;
          case MethodKind::kUnbiasedDiff: {
            CompressedStep step =
                device_step_unbiased_diff(g, dev.reference, cfg_.method.compressor, rng);
            dev.reference = std::move(step.next_state);
            // The server reconstructs g_hat_i = h_i + message, then applies the
            // device's reference update to its own copy of h_i.
            Vector reconstructed = add(server_reference_[i], step.message);
            axpy(reference_step(cfg_.method.compressor), step.message,
                 server_reference_[i]);
            messages.push_back(std::move(reconstructed));
            break;
          }
          case MethodKind::kUncompressed:
            messages.push_back(g);
            break;
        }
      }

      const Vector aggregate = server_aggregate(messages, dim_);
      Vector next = server_update(theta, aggregate, cfg_.method, gamma);

      if (cfg_.method.scales_on_device() && rec.nonstragglers > 0) {
        const double denom = norm_sq(input_sum);
        if (denom > 0.0) {
          rec.qa = norm_sq(residue_sum) / denom;
          qa_max = std::max(qa_max, rec.qa);
        }
      }
      if (track_virtual) {
        const Vector x_after = virtual_iterate(next, errors());
        Vector expected = x_before;
        axpy(-gamma, coded_sum, expected);
        const double scale = std::max({norm(x_after), norm(x_before), gamma * norm(coded_sum)});
        rec.residual = relative_gap(x_after, expected, scale);
        out_.max_residual = std::max(out_.max_residual, rec.residual);
        if (cfg_.debug_invariants && !(rec.residual <= cfg_.invariant_tolerance)) {
          throw InvariantViolation("virtual-iterate identity violated", trial_, t,
                                   rec.residual);
        }
        if (cfg_.emit_theory) error_energy += norm_sq(sum_of(errors(), dim_));
      }

      out_.records.push_back(rec);
      theta = std::move(next);
    }

    if (cfg_.emit_theory) {
      finish_theory(theory, beta_seen, qa_max, error_energy, sum_grad, first);
      out_.theory.push_back(theory);
    }
  }

 private:
  std::vector<Vector> errors() const {
    std::vector<Vector> es;
    es.reserve(devices_.size());
    for (const auto& d : devices_) es.push_back(d.error);
    return es;
  }

  // (1 - p) sum_i g_i over all devices must reproduce grad F.
  void check_encoding(const std::vector<double>& grads, const Vector& full,
                      std::size_t t) {
    Vector total(dim_, 0.0);
    for (const auto& dev : devices_) {
      axpy(1.0, encode_local(dev.subsets, grads, replication_, cfg_.p, dim_), total);
    }
    for (double& v : total) v *= 1.0 - cfg_.p;
    double scale = 0.0;
    for (std::size_t k = 0; k < cfg_.subsets; ++k) {
      scale += norm(std::span<const double>(grads).subspan(k * dim_, dim_));
    }
    const double r = relative_gap(total, full, std::max(scale, norm(full)));
    out_.max_encoding_residual = std::max(out_.max_encoding_residual, r);
    if (!(r <= cfg_.invariant_tolerance)) {
      throw InvariantViolation("encoding identity violated", trial_, t, r);
    }
  }

  void finish_theory(TrialTheory& th, double beta_seen, double qa_max,
                     double error_energy, double sum_grad, std::size_t first) {
    th.L = theory::estimate_L(setup_.task);
    th.beta_trajectory = beta_seen;
    th.beta = kBetaSafetyFactor * beta_seen;
    th.qa_max = qa_max;
    th.vartheta = vartheta(setup_.allocation);
    th.Fstar = 0.0;  // F is a sum of squares
    th.sum_grad_norm_sq = sum_grad;
    th.error_energy = error_energy;
    if (!theory_applies(cfg_.method)) return;
    th.delta = delta_of(cfg_.method.compressor);
    theory::TheoryInputs in = inputs(th, 1.0);
    th.conditions_met =
        th.delta < 0.5 && th.qa_max < (2.0 * th.delta + 1.0) / 2.0;
    if (!th.conditions_met) return;
    th.constants = theory::constants(in);
    if (cfg_.lr_schedule != LrSchedule::kConstant) return;
    const double T = static_cast<double>(cfg_.iterations - 1);
    th.error_energy_bound = theory::error_energy_bound(
        T, cfg_.gamma0, th.constants->xi1, th.constants->xi2, sum_grad);

    // A constant rate gamma over horizon t corresponds to phi = gamma sqrt(t+1).
    const theory::Epsilons eps{th.constants->eps0, th.constants->eps1,
                               th.constants->rho0, th.constants->optimized};
    for (std::size_t t = 0; t < cfg_.iterations; ++t) {
      const double phi = cfg_.gamma0 * std::sqrt(static_cast<double>(t) + 1.0);
      const theory::TheoryInputs at = inputs(th, phi);
      if (static_cast<double>(t) > theory::min_horizon(at, eps)) {
        out_.records[first + t].bound =
            theory::convergence_bound(static_cast<double>(t), at, eps);
      }
    }
  }

  theory::TheoryInputs inputs(const TrialTheory& th, double phi) const {
    theory::TheoryInputs in;
    in.p = cfg_.p;
    in.delta = th.delta;
    in.qa = th.qa_max;
    in.devices = cfg_.devices;
    in.subsets = cfg_.subsets;
    in.vartheta = th.vartheta;
    in.L = th.L;
    in.beta = th.beta;
    in.F0 = th.F0;
    in.Fstar = th.Fstar;
    in.phi = phi;
    return in;
  }

  const ExperimentConfig& cfg_;
  std::size_t trial_;
  RunMetrics& out_;
  TrialSetup setup_;
  std::size_t dim_;
  std::vector<std::size_t> replication_;
  std::uint64_t seed_;
  std::vector<DeviceState> devices_;
  std::vector<Vector> server_reference_;
};

}  // namespace

TrialSetup make_trial_setup(const ExperimentConfig& config, std::size_t trial) {
  const std::uint64_t seed = trial_seed(config.seed, trial);
  RandomStream task_rng(seed, StreamTag::kTask);
  RandomStream alloc_rng(seed, StreamTag::kAllocation);
  RandomStream init_rng(seed, StreamTag::kInit);
  LinearRegressionTask task = generate_synthetic(config.subsets, config.dim, task_rng);
  const auto d = config.replication_per_subset();
  AllocationMatrix allocation = uniform_random_allocation(config.devices, d, alloc_rng);
  Vector theta0(config.dim);
  for (double& v : theta0) v = init_rng.normal();
  return {std::move(task), std::move(allocation), std::move(theta0)};
}

RunMetrics run_experiment(const ExperimentConfig& config) {
  config.validate();
  RunMetrics metrics;
  metrics.trials = config.trials;
  metrics.iterations = config.iterations;
  metrics.has_bound = config.emit_theory;
  metrics.records.reserve(config.trials * config.iterations);
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    TrialRunner(config, trial, metrics).run();
  }
  metrics.summarize();
  return metrics;
}

}  // namespace gcsim
