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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "gcsim/harness.hpp"
#include "gcsim/presets.hpp"
#include "gcsim/validation.hpp"

using namespace gcsim;

namespace {

ExperimentConfig small_config(MethodKind kind, CompressorSpec spec) {
  ExperimentConfig cfg;
  cfg.devices = 10;
  cfg.subsets = 12;
  cfg.dim = spec.dim;
  cfg.replication = {3};
  cfg.p = 0.3;
  cfg.method = {kind, std::move(spec)};
  cfg.iterations = 40;
  cfg.gamma0 = 2e-4;
  cfg.trials = 2;
  cfg.seed = 17;
  return cfg;
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("uncompressed full replication matches plain gradient descent bit for bit") {
  ExperimentConfig cfg;
  cfg.devices = 8;
  cfg.subsets = 6;
  cfg.dim = 4;
  cfg.replication = {8};
  cfg.p = 0.0;
  cfg.method = {MethodKind::kUncompressed, CompressorSpec::identity(4)};
  cfg.iterations = 500;
  cfg.gamma0 = 1e-4;
  cfg.trials = 1;
  cfg.seed = 3;
  const auto metrics = run_experiment(cfg);
  const auto setup = make_trial_setup(cfg, 0);
  const auto& task = setup.task;

  std::vector<double> theta = setup.theta0;
  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    double loss = 0.0;
    std::vector<double> grad(cfg.dim, 0.0);
    for (std::size_t k = 0; k < cfg.subsets; ++k) {
      double r = 0.0;
      for (std::size_t j = 0; j < cfg.dim; ++j) r += theta[j] * task.feature(k)[j];
      r -= task.label(k);
      loss += 0.5 * r * r;
      for (std::size_t j = 0; j < cfg.dim; ++j) grad[j] += r * task.feature(k)[j];
    }
    REQUIRE(metrics.at(0, t).loss == loss);
    for (std::size_t j = 0; j < cfg.dim; ++j) theta[j] -= cfg.gamma0 * grad[j];
  }
}

TEST_CASE("identical configs give identical metrics and CSV bytes") {
  const auto cfg = small_config(MethodKind::kCocoEF, CompressorSpec::top_k(8, 3));
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].loss == b.records[i].loss);
    CHECK(a.records[i].nonstragglers == b.records[i].nonstragglers);
  }
  const auto dir = std::filesystem::temp_directory_path();
  const std::string pa = (dir / "gcsim_det_a.csv").string();
  const std::string pb = (dir / "gcsim_det_b.csv").string();
  emit_csv(a, pa);
  emit_csv(b, pb);
  CHECK(file_bytes(pa) == file_bytes(pb));
}

TEST_CASE("trial 0 does not depend on the number of trials") {
  for (auto kind : {MethodKind::kCocoEF, MethodKind::kUnbiased}) {
    auto cfg = kind == MethodKind::kCocoEF
                   ? small_config(kind, CompressorSpec::sign(8))
                   : small_config(kind, CompressorSpec::stochastic_sign(8));
    cfg.trials = 1;
    const auto one = run_experiment(cfg);
    cfg.trials = 5;
    const auto five = run_experiment(cfg);
    for (std::size_t t = 0; t < cfg.iterations; ++t) {
      CHECK(one.at(0, t).loss == five.at(0, t).loss);
    }
    CHECK(five.at(1, 0).loss != five.at(0, 0).loss);
  }
}

TEST_CASE("methods share the task, allocation, initial model and stragglers") {
  const auto ef = small_config(MethodKind::kCocoEF, CompressorSpec::sign(8));
  const auto ub = small_config(MethodKind::kUnbiasedDiff, CompressorSpec::rand_k(8, 2));
  const auto sa = make_trial_setup(ef, 1);
  const auto sb = make_trial_setup(ub, 1);
  CHECK(sa.task == sb.task);
  CHECK(sa.allocation == sb.allocation);
  CHECK(sa.theta0 == sb.theta0);
  const auto ma = run_experiment(ef);
  const auto mb = run_experiment(ub);
  for (std::size_t i = 0; i < ma.records.size(); ++i) {
    CHECK(ma.records[i].nonstragglers == mb.records[i].nonstragglers);
  }
  CHECK(ma.at(0, 0).loss == mb.at(0, 0).loss);
}

TEST_CASE("runtime identities hold for every method") {
  const std::vector<MethodSpec> methods{
      {MethodKind::kCocoEF, CompressorSpec::sign(8)},
      {MethodKind::kCocoEF, CompressorSpec::top_k(8, 2)},
      {MethodKind::kCocoEF, CompressorSpec::grouped_sign(8, 3)},
      {MethodKind::kCoco, CompressorSpec::top_k(8, 2)},
      {MethodKind::kUnbiased, CompressorSpec::stochastic_sign(8)},
      {MethodKind::kUnbiasedDiff, CompressorSpec::rand_k(8, 2)},
      {MethodKind::kUncompressed, CompressorSpec::identity(8)}};
  for (const auto& m : methods) {
    INFO(m.describe());
    auto cfg = small_config(m.kind, m.compressor);
    cfg.debug_invariants = true;
    cfg.emit_theory = true;
    RunMetrics metrics;
    CHECK_NOTHROW(metrics = run_experiment(cfg));
    CHECK(metrics.max_encoding_residual <= 1e-9);
    if (m.kind == MethodKind::kCocoEF) {
      CHECK(metrics.max_residual <= 1e-9);
      CHECK(std::isfinite(metrics.at(0, 5).residual));
      CHECK(std::isfinite(metrics.at(0, 5).qa));
    } else {
      CHECK(std::isnan(metrics.at(0, 5).residual));
    }
    CHECK(metrics.theory.size() == 2);
  }
}

TEST_CASE("near-certain stragglers still complete") {
  ExperimentConfig cfg;
  cfg.devices = 2;
  cfg.subsets = 3;
  cfg.dim = 3;
  cfg.replication = {1};
  cfg.p = 0.99;
  cfg.method = {MethodKind::kCocoEF, CompressorSpec::sign(3)};
  cfg.iterations = 10;
  cfg.gamma0 = 1e-5;
  cfg.trials = 1;
  const auto m = run_experiment(cfg);
  for (const auto& r : m.records) CHECK(std::isfinite(r.loss));
}

TEST_CASE("divergence is reported as an invariant violation") {
  auto cfg = small_config(MethodKind::kUncompressed, CompressorSpec::identity(8));
  cfg.gamma0 = 1.0;
  cfg.iterations = 400;
  CHECK_THROWS_AS(run_experiment(cfg), InvariantViolation);
}

TEST_CASE("error feedback on a loose tolerance run reports the theory diagnostics") {
  ExperimentConfig cfg;
  cfg.devices = 20;
  cfg.subsets = 20;
  cfg.dim = 10;
  cfg.replication = {5};
  cfg.p = 0.2;
  cfg.method = {MethodKind::kCocoEF, CompressorSpec::top_k(10, 6)};
  cfg.iterations = 100;
  cfg.gamma0 = 1e-5;
  cfg.trials = 1;
  cfg.emit_theory = true;
  const auto m = run_experiment(cfg);
  REQUIRE(m.theory.size() == 1);
  const auto& th = m.theory[0];
  CHECK(th.delta == doctest::Approx(0.4));
  CHECK(th.L > 0.0);
  CHECK(th.beta > 0.0);
  CHECK(th.vartheta == doctest::Approx(20 * (1.0 / 5 - 1.0 / 20)));
  CHECK(th.F0 == m.at(0, 0).loss);
  CHECK(m.has_bound);
}

TEST_CASE("fig2 CocoEF sign shows a decreasing mean loss trend") {
  PresetOptions opts;
  opts.iterations = 1000;
  const auto entries = preset_entries(Figure::kFig2, opts);
  REQUIRE(entries.size() == 6);
  const auto& cfg = entries[0].config;
  CHECK(cfg.method.kind == MethodKind::kCocoEF);
  CHECK(cfg.method.compressor.kind == CompressorKind::kGroupedSignBit);
  CHECK(cfg.devices == 100);
  CHECK(cfg.replication_per_subset()[0] == 5);
  CHECK(cfg.p == 0.2);
  CHECK(cfg.gamma0 == 1e-5);
  CHECK(cfg.trials == 5);
  const auto m = run_experiment(cfg);
  for (std::size_t t = 100; t < 1000; t += 100) {
    CHECK(m.summary[t].loss_mean < m.summary[t - 100].loss_mean);
  }
}

TEST_CASE("preset grids") {
  PresetOptions opts;
  opts.iterations = 10;
  CHECK(preset_entries(Figure::kFig3, opts).size() == 5);
  const auto fig4 = preset_entries(Figure::kFig4, opts);
  REQUIRE(fig4.size() == 4);
  CHECK(fig4[0].config.replication_per_subset()[0] == 1);
  CHECK(fig4[3].config.replication_per_subset()[0] == 20);
  CHECK(fig4[0].config.p == 0.9);
  CHECK(preset_entries(Figure::kFig5, opts).size() == 4);
  const auto fig6 = preset_entries(Figure::kFig6, opts);
  REQUIRE(fig6.size() == 2);
  CHECK(fig6[0].config.gamma0 == 2e-5);
  CHECK(fig6[1].config.lr_schedule == LrSchedule::kInvSqrt);
  for (auto f : {Figure::kFig2, Figure::kFig3, Figure::kFig4, Figure::kFig5, Figure::kFig6}) {
    CHECK(figure_from_string(to_string(f)) == f);
    for (const auto& e : preset_entries(f, opts)) {
      CHECK_NOTHROW(e.config.validate());
      CHECK(e.config.iterations == 10);
    }
  }
  CHECK_THROWS_AS(figure_from_string("fig7"), ConfigError);
}

TEST_CASE("invariant suite passes") {
  for (const auto& r : run_invariant_suite(1)) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}
