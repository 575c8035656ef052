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

// Per-iteration measurements of a multi-trial run and their CSV form.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gcsim/theory.hpp"

namespace gcsim {

struct IterationRecord {
  std::size_t trial = 0;
  std::size_t iteration = 0;
  double loss = 0.0;            // F(theta^t)
  double grad_norm_sq = 0.0;    // ||grad F(theta^t)||^2
  std::size_t nonstragglers = 0;
  double qa = 0.0;        // measured aggregate discrepancy, NaN when n/a
  double residual = 0.0;  // virtual-iterate residual, NaN when n/a
  double bound = 0.0;     // convergence bound at horizon t, NaN when n/a

  bool operator==(const IterationRecord&) const = default;
};

struct IterationSummary {
  std::size_t iteration = 0;
  double loss_mean = 0.0;
  double loss_std = 0.0;
  double grad_norm_sq_mean = 0.0;
  double grad_norm_sq_std = 0.0;
};

/// Theory-side diagnostics of one trial (filled when emit_theory is set).
struct TrialTheory {
  double L = 0.0;
  double beta_trajectory = 0.0;  // max heterogeneity seen along the run
  double beta = 0.0;             // value used in the bound (2x heuristic margin)
  double qa_max = 0.0;
  double vartheta = 0.0;
  double delta = 0.0;
  double F0 = 0.0;
  double Fstar = 0.0;
  /// delta < 0.5 and qa_max < (2 delta + 1)/2; the constants are set only then.
  bool conditions_met = false;
  std::optional<theory::TheoryConstants> constants;
  /// sum_t ||sum_i e_i^{t+1}||^2 and its bound (error feedback runs only).
  double error_energy = 0.0;
  double error_energy_bound = 0.0;
  double sum_grad_norm_sq = 0.0;
};

struct RunMetrics {
  std::size_t trials = 0;
  std::size_t iterations = 0;
  bool has_bound = false;
  /// Ordered by (trial, iteration).
  std::vector<IterationRecord> records;
  std::vector<IterationSummary> summary;
  std::vector<TrialTheory> theory;
  double max_residual = 0.0;
  double max_encoding_residual = 0.0;

  /// Recomputes `summary` from `records` (sample standard deviation).
  void summarize();
  /// Mean across trials of the loss at the last recorded iteration.
  double final_mean_loss() const;
  const IterationRecord& at(std::size_t trial, std::size_t iteration) const {
    return records[trial * iterations + iteration];
  }
};

/// Writes `path` (one row per record) and `path.summary` (one row per
/// iteration). Throws std::runtime_error naming the path on I/O failure.
void emit_csv(const RunMetrics& metrics, const std::string& path);
/// Reads the per-record file back (summary recomputed).
RunMetrics read_csv(const std::string& path);

inline constexpr const char* kCsvHeader =
    "trial,iter,loss,grad_norm_sq,nonstragglers,qa,residual";

}  // namespace gcsim
