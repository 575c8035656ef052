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

// gcsim: command-line front end.
//
//   gcsim run <config> [--out metrics.csv]
//   gcsim preset <fig2..fig6> [--out-dir DIR] [--iterations T] [--trials K]
//   gcsim theory --p 0.2 --delta 0.4 --qa 0.3 --N 100 --M 100 --d 5 ...
//   gcsim validate

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "gcsim/allocation.hpp"
#include "gcsim/config.hpp"
#include "gcsim/format.hpp"
#include "gcsim/harness.hpp"
#include "gcsim/presets.hpp"
#include "gcsim/theory.hpp"
#include "gcsim/validation.hpp"

namespace {

void print_theory(const gcsim::RunMetrics& m) {
  for (std::size_t t = 0; t < m.theory.size(); ++t) {
    const auto& th = m.theory[t];
    std::cout << "trial " << t << ": L=" << th.L << " beta=" << th.beta
              << " qa_max=" << th.qa_max << " vartheta=" << th.vartheta
              << " delta=" << th.delta;
    if (th.constants) {
      std::cout << " xi1=" << th.constants->xi1 << " xi2=" << th.constants->xi2
                << " eps0=" << th.constants->eps0 << " eps1=" << th.constants->eps1;
    } else {
      std::cout << " (bound conditions not met)";
    }
    std::cout << '\n';
  }
}

int cmd_run(const std::string& config_path, const std::string& out) {
  const gcsim::ExperimentConfig cfg = gcsim::load_config(config_path);
  const gcsim::RunMetrics m = gcsim::run_experiment(cfg);
  gcsim::emit_csv(m, out);
  std::cout << "wrote " << out << " (" << m.records.size() << " rows); final mean loss "
            << m.final_mean_loss() << '\n';
  if (cfg.emit_theory) print_theory(m);
  return 0;
}

int cmd_preset(const std::string& name, const std::string& out_dir,
               const gcsim::PresetOptions& opt) {
  const gcsim::Figure figure = gcsim::figure_from_string(name);
  std::filesystem::create_directories(out_dir);
  for (const auto& run : gcsim::run_figure_preset(figure, opt)) {
    const auto path =
        (std::filesystem::path(out_dir) / (name + "_" + run.label + ".csv")).string();
    gcsim::emit_csv(run.metrics, path);
    std::cout << name << ' ' << run.label << ": final mean loss "
              << run.metrics.final_mean_loss() << " -> " << path << '\n';
  }
  return 0;
}

int cmd_theory(gcsim::theory::TheoryInputs in, std::size_t replication,
               double horizon, std::size_t points) {
  if (in.vartheta < 0.0) {
    std::vector<std::size_t> d(in.subsets, replication);
    in.vartheta = gcsim::vartheta(d, in.devices);
  }
  const auto c = gcsim::theory::constants(in);
  const gcsim::theory::Epsilons eps{c.eps0, c.eps1, c.rho0, c.optimized};
  std::cout << "vartheta=" << gcsim::format_double(in.vartheta) << '\n'
            << "xi1=" << gcsim::format_double(c.xi1) << '\n'
            << "xi2=" << gcsim::format_double(c.xi2) << '\n'
            << "eps0=" << gcsim::format_double(c.eps0) << '\n'
            << "eps1=" << gcsim::format_double(c.eps1) << '\n'
            << "rho0=" << gcsim::format_double(c.rho0)
            << (c.optimized ? "" : " (fallback)") << '\n'
            << "min_T=" << gcsim::format_double(gcsim::theory::min_horizon(in, eps))
            << '\n'
            << "T,bound\n";
  const double lo = std::max(1.0, std::floor(gcsim::theory::min_horizon(in, eps)) + 1.0);
  for (std::size_t i = 0; i < points; ++i) {
    const double frac = points == 1 ? 1.0 : static_cast<double>(i) / (points - 1);
    const double T = std::round(lo * std::pow(std::max(horizon, lo) / lo, frac));
    if (T <= gcsim::theory::min_horizon(in, eps)) continue;
    std::cout << gcsim::format_double(T) << ','
              << gcsim::format_double(gcsim::theory::convergence_bound(T, in, eps)) << '\n';
  }
  return 0;
}

int cmd_validate(std::uint64_t seed) {
  int failures = 0;
  for (const auto& r : gcsim::run_invariant_suite(seed)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) std::cout << " (" << r.detail << ')';
    std::cout << '\n';
    failures += r.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for compressed gradient coding with error feedback"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path, out = "metrics.csv";
  run->add_option("config", config_path, "Config file (key = value)")->required();
  run->add_option("--out", out, "Output CSV path");

  auto* preset = app.add_subcommand("preset", "Run a figure preset");
  std::string preset_name, out_dir = "results";
  gcsim::PresetOptions opt;
  preset->add_option("name", preset_name, "fig2, fig3, fig4, fig5 or fig6")->required();
  preset->add_option("--out-dir", out_dir, "Directory for the CSV files");
  preset->add_option("--iterations", opt.iterations, "Override the horizon T");
  preset->add_option("--trials", opt.trials, "Trials per method");
  preset->add_option("--seed", opt.seed, "Root seed");
  preset->add_flag("--debug-invariants", opt.debug_invariants,
                   "Abort on identity violations");

  auto* theory = app.add_subcommand("theory", "Print the convergence constants and bound");
  gcsim::theory::TheoryInputs in;
  in.vartheta = -1.0;
  std::size_t replication = 1;
  double horizon = 1e4;
  std::size_t points = 10;
  theory->add_option("--p", in.p, "Straggler probability")->required();
  theory->add_option("--delta", in.delta, "Compressor contraction constant")->required();
  theory->add_option("--qa", in.qa, "Aggregate discrepancy q_A")->required();
  theory->add_option("--N", in.devices, "Devices")->required();
  theory->add_option("--M", in.subsets, "Subsets")->required();
  theory->add_option("--d", replication, "Uniform replication (derives vartheta)");
  theory->add_option("--vartheta", in.vartheta, "Allocation constant (overrides --d)");
  theory->add_option("--L", in.L, "Smoothness constant")->required();
  theory->add_option("--beta", in.beta, "Heterogeneity bound")->required();
  theory->add_option("--F0", in.F0, "Initial loss")->required();
  theory->add_option("--Fstar", in.Fstar, "Loss lower bound");
  theory->add_option("--phi", in.phi, "Learning-rate scale")->required();
  theory->add_option("--T", horizon, "Largest horizon of the bound curve");
  theory->add_option("--points", points, "Points on the bound curve");

  auto* validate = app.add_subcommand("validate", "Run the invariant self-check suite");
  std::uint64_t validate_seed = 7;
  validate->add_option("--seed", validate_seed, "Seed for the randomized checks");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config_path, out);
    if (*preset) return cmd_preset(preset_name, out_dir, opt);
    if (*theory) return cmd_theory(in, replication, horizon, points);
    if (*validate) return cmd_validate(validate_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
