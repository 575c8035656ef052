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

// Parameter grids of the linear-regression figures: method comparison,
// straggler probability sweep, replication sweep, error-feedback ablation and
// constant vs decaying learning rate.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gcsim/config.hpp"
#include "gcsim/metrics.hpp"

namespace gcsim {

enum class Figure { kFig2, kFig3, kFig4, kFig5, kFig6 };

std::string to_string(Figure figure);
Figure figure_from_string(const std::string& name);

struct PresetOptions {
  /// 0 selects the preset's default horizon.
  std::size_t iterations = 0;
  std::size_t trials = 5;
  std::uint64_t seed = 2024;
  bool debug_invariants = false;
};

struct PresetEntry {
  std::string label;  // file-name safe
  ExperimentConfig config;
};

struct PresetRun {
  std::string label;
  ExperimentConfig config;
  RunMetrics metrics;
};

std::size_t default_iterations(Figure figure);
std::vector<PresetEntry> preset_entries(Figure figure, const PresetOptions& options);
std::vector<PresetRun> run_figure_preset(Figure figure, const PresetOptions& options);

}  // namespace gcsim
