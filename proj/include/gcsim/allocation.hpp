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

// Redundant assignment of training subsets to devices.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gcsim/rng.hpp"

namespace gcsim {

/// N x M binary matrix s(i, k) = 1 iff subset k is stored on device i.
/// Immutable; every subset is held by at least one device.
class AllocationMatrix {
 public:
  /// rows[i][k] must be 0 or 1.
  static AllocationMatrix from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t devices() const { return devices_; }
  std::size_t subsets() const { return subsets_; }
  bool holds(std::size_t device, std::size_t subset) const {
    return cells_[device * subsets_ + subset] != 0;
  }
  /// d_k, the number of devices holding subset k.
  std::size_t replication(std::size_t subset) const { return replication_[subset]; }
  std::span<const std::size_t> replication() const { return replication_; }
  /// S_i in ascending subset order.
  std::span<const std::size_t> device_subsets(std::size_t device) const {
    return device_subsets_[device];
  }

  bool operator==(const AllocationMatrix&) const = default;

 private:
  AllocationMatrix(std::size_t devices, std::size_t subsets,
                   std::vector<std::uint8_t> cells);

  std::size_t devices_ = 0;
  std::size_t subsets_ = 0;
  std::vector<std::uint8_t> cells_;
  std::vector<std::size_t> replication_;
  std::vector<std::vector<std::size_t>> device_subsets_;
};

/// Each subset independently placed on `replication` distinct devices drawn
/// uniformly without replacement.
AllocationMatrix uniform_random_allocation(std::size_t devices,
                                           std::size_t subsets,
                                           std::size_t replication,
                                           RandomStream& rng);

/// Heterogeneous variant: subset k is placed on replication[k] devices.
AllocationMatrix uniform_random_allocation(std::size_t devices,
                                           std::span<const std::size_t> replication,
                                           RandomStream& rng);

struct PairwiseBalanceStats {
  std::vector<std::size_t> counts;  // sum_i s(i, k)
  /// overlap[k1 * M + k2] = sum_i s(i, k1) s(i, k2); the diagonal equals counts.
  std::vector<std::size_t> overlap;
  /// max over k1 != k2 of |overlap - d_k1 d_k2 / N|; 0 when M = 1.
  double max_deviation = 0.0;
};

PairwiseBalanceStats pairwise_balance_stats(const AllocationMatrix& a);

/// sum_k (1/d_k - 1/N).
double vartheta(std::span<const std::size_t> replication, std::size_t devices);
inline double vartheta(const AllocationMatrix& a) {
  return vartheta(a.replication(), a.devices());
}

/// Plain-text matrix, one device per line, space-separated 0/1 entries.
void write_allocation(std::ostream& os, const AllocationMatrix& a);
AllocationMatrix read_allocation(std::istream& is);

}  // namespace gcsim
