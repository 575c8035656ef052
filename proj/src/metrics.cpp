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

#include "gcsim/metrics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gcsim/format.hpp"

namespace gcsim {
namespace {

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

}  // namespace

void RunMetrics::summarize() {
  summary.clear();
  if (records.empty()) return;
  std::size_t last = 0;
  for (const auto& r : records) last = std::max(last, r.iteration);
  std::vector<std::vector<double>> losses(last + 1), grads(last + 1);
  for (const auto& r : records) {
    losses[r.iteration].push_back(r.loss);
    grads[r.iteration].push_back(r.grad_norm_sq);
  }
  for (std::size_t t = 0; t <= last; ++t) {
    const Moments l = moments(losses[t]);
    const Moments g = moments(grads[t]);
    summary.push_back({t, l.mean, l.stddev, g.mean, g.stddev});
  }
}

double RunMetrics::final_mean_loss() const {
  if (summary.empty()) throw std::logic_error("final_mean_loss: no summary");
  return summary.back().loss_mean;
}

void emit_csv(const RunMetrics& metrics, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << kCsvHeader << (metrics.has_bound ? ",bound" : "") << '\n';
  for (const auto& r : metrics.records) {
    out << r.trial << ',' << r.iteration << ',' << format_double(r.loss) << ','
        << format_double(r.grad_norm_sq) << ',' << r.nonstragglers << ','
        << format_double(r.qa) << ',' << format_double(r.residual);
    if (metrics.has_bound) out << ',' << format_double(r.bound);
    out << '\n';
  }
  if (!out) throw std::runtime_error("I/O error while writing '" + path + "'");

  const std::string summary_path = path + ".summary";
  std::ofstream sum(summary_path);
  if (!sum) throw std::runtime_error("cannot write '" + summary_path + "'");
  sum << "iter,loss_mean,loss_std,grad_norm_sq_mean,grad_norm_sq_std\n";
  for (const auto& s : metrics.summary) {
    sum << s.iteration << ',' << format_double(s.loss_mean) << ','
        << format_double(s.loss_std) << ',' << format_double(s.grad_norm_sq_mean)
        << ',' << format_double(s.grad_norm_sq_std) << '\n';
  }
  if (!sum) throw std::runtime_error("I/O error while writing '" + summary_path + "'");
}

RunMetrics read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
  RunMetrics m;
  if (line == std::string(kCsvHeader) + ",bound") {
    m.has_bound = true;
  } else if (line != kCsvHeader) {
    throw std::runtime_error("'" + path + "': unexpected header");
  }
  std::size_t max_trial = 0, max_iter = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != (m.has_bound ? 8u : 7u)) {
      throw std::runtime_error("'" + path + "': malformed row '" + line + "'");
    }
    IterationRecord r;
    r.trial = std::stoul(f[0]);
    r.iteration = std::stoul(f[1]);
    r.loss = parse_double(f[2]);
    r.grad_norm_sq = parse_double(f[3]);
    r.nonstragglers = std::stoul(f[4]);
    r.qa = parse_double(f[5]);
    r.residual = parse_double(f[6]);
    r.bound = m.has_bound ? parse_double(f[7]) : std::nan("");
    max_trial = std::max(max_trial, r.trial);
    max_iter = std::max(max_iter, r.iteration);
    m.records.push_back(r);
  }
  if (!m.records.empty()) {
    m.trials = max_trial + 1;
    m.iterations = max_iter + 1;
  }
  m.summarize();
  return m;
}

}  // namespace gcsim
