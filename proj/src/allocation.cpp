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

#include "gcsim/allocation.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gcsim/errors.hpp"

namespace gcsim {

AllocationMatrix::AllocationMatrix(std::size_t devices, std::size_t subsets,
                                   std::vector<std::uint8_t> cells)
    : devices_(devices),
      subsets_(subsets),
      cells_(std::move(cells)),
      replication_(subsets, 0),
      device_subsets_(devices) {
  for (std::size_t i = 0; i < devices_; ++i) {
    for (std::size_t k = 0; k < subsets_; ++k) {
      if (holds(i, k)) {
        ++replication_[k];
        device_subsets_[i].push_back(k);
      }
    }
  }
  for (std::size_t k = 0; k < subsets_; ++k) {
    if (replication_[k] == 0) {
      throw ConfigError("allocation: subset " + std::to_string(k) +
                        " is not held by any device");
    }
  }
}

AllocationMatrix AllocationMatrix::from_rows(
    const std::vector<std::vector<int>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw ConfigError("allocation: matrix must be at least 1x1");
  }
  const std::size_t n = rows.size();
  const std::size_t m = rows.front().size();
  std::vector<std::uint8_t> cells(n * m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != m) throw ConfigError("allocation: ragged matrix");
    for (std::size_t k = 0; k < m; ++k) {
      const int v = rows[i][k];
      if (v != 0 && v != 1) throw ConfigError("allocation: entries must be 0/1");
      cells[i * m + k] = static_cast<std::uint8_t>(v);
    }
  }
  return AllocationMatrix(n, m, std::move(cells));
}

AllocationMatrix uniform_random_allocation(std::size_t devices,
                                           std::size_t subsets,
                                           std::size_t replication,
                                           RandomStream& rng) {
  const std::vector<std::size_t> d(subsets, replication);
  return uniform_random_allocation(devices, d, rng);
}

AllocationMatrix uniform_random_allocation(std::size_t devices,
                                           std::span<const std::size_t> replication,
                                           RandomStream& rng) {
  if (devices < 1 || replication.empty()) {
    throw ConfigError("allocation: need at least one device and one subset");
  }
  const std::size_t m = replication.size();
  std::vector<std::vector<int>> rows(devices, std::vector<int>(m, 0));
  for (std::size_t k = 0; k < m; ++k) {
    if (replication[k] < 1 || replication[k] > devices) {
      throw ConfigError("allocation: replication must lie in [1, N]; got d=" +
                        std::to_string(replication[k]) +
                        ", N=" + std::to_string(devices));
    }
    for (std::size_t i : rng.sample_without_replacement(devices, replication[k])) {
      rows[i][k] = 1;
    }
  }
  return AllocationMatrix::from_rows(rows);
}

PairwiseBalanceStats pairwise_balance_stats(const AllocationMatrix& a) {
  const std::size_t n = a.devices();
  const std::size_t m = a.subsets();
  PairwiseBalanceStats stats;
  stats.counts.assign(m, 0);
  stats.overlap.assign(m * m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto held = a.device_subsets(i);
    for (std::size_t k1 : held) {
      ++stats.counts[k1];
      for (std::size_t k2 : held) ++stats.overlap[k1 * m + k2];
    }
  }
  for (std::size_t k1 = 0; k1 < m; ++k1) {
    for (std::size_t k2 = 0; k2 < m; ++k2) {
      if (k1 == k2) continue;
      const double target = static_cast<double>(a.replication(k1)) *
                            static_cast<double>(a.replication(k2)) /
                            static_cast<double>(n);
      const double dev =
          std::abs(static_cast<double>(stats.overlap[k1 * m + k2]) - target);
      stats.max_deviation = std::max(stats.max_deviation, dev);
    }
  }
  return stats;
}

double vartheta(std::span<const std::size_t> replication, std::size_t devices) {
  double sum = 0.0;
  for (std::size_t d : replication) {
    sum += 1.0 / static_cast<double>(d) - 1.0 / static_cast<double>(devices);
  }
  return sum;
}

void write_allocation(std::ostream& os, const AllocationMatrix& a) {
  for (std::size_t i = 0; i < a.devices(); ++i) {
    for (std::size_t k = 0; k < a.subsets(); ++k) {
      if (k) os << ' ';
      os << (a.holds(i, k) ? 1 : 0);
    }
    os << '\n';
  }
}

AllocationMatrix read_allocation(std::istream& is) {
  std::vector<std::vector<int>> rows;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::vector<int> row;
    int v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw ConfigError("allocation: non-integer entry in matrix file");
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return AllocationMatrix::from_rows(rows);
}

}  // namespace gcsim
