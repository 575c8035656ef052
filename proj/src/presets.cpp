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

#include "gcsim/presets.hpp"

#include "gcsim/errors.hpp"
#include "gcsim/harness.hpp"

namespace gcsim {
namespace {

constexpr std::size_t kSize = 100;  // N = M = D
constexpr std::size_t kSparsity = 2;
constexpr std::size_t kDefaultIterations = 2000;

ExperimentConfig base(const PresetOptions& opt, Figure figure) {
  ExperimentConfig cfg;
  cfg.devices = kSize;
  cfg.subsets = kSize;
  cfg.dim = kSize;
  cfg.replication = {5};
  cfg.p = 0.2;
  cfg.method = {MethodKind::kCocoEF, CompressorSpec::sign(kSize)};
  cfg.iterations = opt.iterations ? opt.iterations : default_iterations(figure);
  cfg.gamma0 = 1e-5;
  cfg.lr_schedule = LrSchedule::kConstant;
  cfg.trials = opt.trials;
  cfg.seed = opt.seed;
  cfg.debug_invariants = opt.debug_invariants;
  return cfg;
}

ExperimentConfig with_method(ExperimentConfig cfg, MethodKind kind,
                             CompressorSpec compressor, double gamma) {
  cfg.method = {kind, std::move(compressor)};
  cfg.gamma0 = gamma;
  return cfg;
}

std::string trim_number(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

std::string to_string(Figure figure) {
  switch (figure) {
    case Figure::kFig2: return "fig2";
    case Figure::kFig3: return "fig3";
    case Figure::kFig4: return "fig4";
    case Figure::kFig5: return "fig5";
    case Figure::kFig6: return "fig6";
  }
  return "unknown";
}

Figure figure_from_string(const std::string& name) {
  for (Figure f : {Figure::kFig2, Figure::kFig3, Figure::kFig4, Figure::kFig5,
                   Figure::kFig6}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown preset '" + name + "' (expected fig2..fig6)");
}

std::size_t default_iterations(Figure) { return kDefaultIterations; }

std::vector<PresetEntry> preset_entries(Figure figure, const PresetOptions& opt) {
  const ExperimentConfig b = base(opt, figure);
  const auto sign = CompressorSpec::sign(kSize);
  const auto topk = CompressorSpec::top_k(kSize, kSparsity);
  const auto stochastic = CompressorSpec::stochastic_sign(kSize);
  const auto randk = CompressorSpec::rand_k(kSize, kSparsity);
  std::vector<PresetEntry> out;
  switch (figure) {
    case Figure::kFig2:
      // Baseline rates as tuned for this comparison.
      out.push_back({"cocoef_sign", with_method(b, MethodKind::kCocoEF, sign, 1e-5)});
      out.push_back({"cocoef_topk", with_method(b, MethodKind::kCocoEF, topk, 1e-5)});
      out.push_back({"unbiased_sign", with_method(b, MethodKind::kUnbiased, stochastic, 2e-6)});
      out.push_back({"unbiased_randk", with_method(b, MethodKind::kUnbiased, randk, 1e-5)});
      out.push_back(
          {"unbiased_diff_sign", with_method(b, MethodKind::kUnbiasedDiff, stochastic, 2e-6)});
      out.push_back(
          {"unbiased_diff_randk", with_method(b, MethodKind::kUnbiasedDiff, randk, 6e-6)});
      break;
    case Figure::kFig3:
      for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        ExperimentConfig cfg = b;
        cfg.replication = {2};
        cfg.p = p;
        out.push_back({"p" + trim_number(p), cfg});
      }
      break;
    case Figure::kFig4:
      for (std::size_t d : {1, 5, 10, 20}) {
        ExperimentConfig cfg = b;
        cfg.replication = {d};
        cfg.p = 0.9;
        out.push_back({"d" + std::to_string(d), cfg});
      }
      break;
    case Figure::kFig5:
      out.push_back({"cocoef_sign", with_method(b, MethodKind::kCocoEF, sign, 1e-5)});
      out.push_back({"coco_sign", with_method(b, MethodKind::kCoco, sign, 1e-5)});
      out.push_back({"cocoef_topk", with_method(b, MethodKind::kCocoEF, topk, 1e-5)});
      out.push_back({"coco_topk", with_method(b, MethodKind::kCoco, topk, 1e-5)});
      break;
    case Figure::kFig6: {
      ExperimentConfig cfg = b;
      cfg.replication = {2};
      cfg.p = 0.5;
      cfg.gamma0 = 2e-5;
      out.push_back({"constant", cfg});
      cfg.lr_schedule = LrSchedule::kInvSqrt;
      out.push_back({"invsqrt", cfg});
      break;
    }
  }
  return out;
}

std::vector<PresetRun> run_figure_preset(Figure figure, const PresetOptions& opt) {
  std::vector<PresetRun> runs;
  for (auto& entry : preset_entries(figure, opt)) {
    RunMetrics metrics = run_experiment(entry.config);
    runs.push_back({std::move(entry.label), std::move(entry.config), std::move(metrics)});
  }
  return runs;
}

}  // namespace gcsim
