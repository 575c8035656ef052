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

// Multi-trial simulation of compressed gradient coding on the synthetic
// linear regression task.

#pragma once

#include <cstddef>

#include "gcsim/allocation.hpp"
#include "gcsim/config.hpp"
#include "gcsim/metrics.hpp"
#include "gcsim/tasks.hpp"

namespace gcsim {

/// Everything a trial draws before the first iteration. Depends only on
/// (seed, trial, N, M, D, d), so every method sees the same task,
/// allocation and initial model.
struct TrialSetup {
  LinearRegressionTask task;
  AllocationMatrix allocation;
  Vector theta0;
};

TrialSetup make_trial_setup(const ExperimentConfig& config, std::size_t trial);

/// Runs `config.trials` independent trials of `config.iterations` iterations.
/// Iteration t records F(theta^t) and the statistics of the step taken from
/// theta^t. Identical configs give bit-identical metrics.
///
/// Throws InvariantViolation when the loss becomes non-finite, or, with
/// debug_invariants, when the virtual-iterate or encoding identity residual
/// exceeds invariant_tolerance.
RunMetrics run_experiment(const ExperimentConfig& config);

}  // namespace gcsim
