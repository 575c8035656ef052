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
#include <sstream>
#include <string>

#include "doctest.h"
#include "gcsim/config.hpp"

using namespace gcsim;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

}  // namespace

TEST_CASE("defaults") {
  const auto cfg = parse("compressor = sign\n");
  CHECK(cfg.devices == 100);
  CHECK(cfg.subsets == 100);
  CHECK(cfg.dim == 100);
  CHECK(cfg.replication_per_subset() == std::vector<std::size_t>(100, 5));
  CHECK(cfg.p == 0.2);
  CHECK(cfg.method.kind == MethodKind::kCocoEF);
  CHECK(cfg.method.compressor.kind == CompressorKind::kGroupedSignBit);
  CHECK(cfg.method.compressor.groups.size() == 1);
  CHECK(cfg.gamma0 == 1e-5);
  CHECK(cfg.lr_schedule == LrSchedule::kConstant);
  CHECK_FALSE(cfg.debug_invariants);
}

TEST_CASE("full config") {
  const auto cfg = parse(R"(# comment line
N = 8
M = 4
D = 6          # trailing comment
d = 1,2,3,8
p = 0.35
method = unbiased_diff
compressor = randk
k = 2
T = 50
gamma0 = 3e-4
lr_schedule = invsqrt
trials = 2
seed = 99
emit_theory = false
debug_invariants = true
invariant_tolerance = 1e-10
)");
  CHECK(cfg.devices == 8);
  CHECK(cfg.replication_per_subset() == std::vector<std::size_t>{1, 2, 3, 8});
  CHECK(cfg.method.kind == MethodKind::kUnbiasedDiff);
  CHECK(cfg.method.compressor.kind == CompressorKind::kAmplifiedRandK);
  CHECK(cfg.method.compressor.k == 2);
  CHECK(cfg.iterations == 50);
  CHECK(cfg.seed == 99);
  CHECK(cfg.debug_invariants);
  CHECK(cfg.learning_rate(0) == doctest::Approx(3e-4));
  CHECK(cfg.learning_rate(3) == doctest::Approx(1.5e-4));
}

TEST_CASE("grouped sign settings") {
  const auto sized = parse("D = 6\ncompressor = sign\ngroup_size = 4\n");
  CHECK(sized.method.compressor.groups.size() == 2);
  const auto listed = parse("D = 4\ncompressor = sign\ngroups = 0,3; 1,2\n");
  REQUIRE(listed.method.compressor.groups.size() == 2);
  CHECK(listed.method.compressor.groups[0] == std::vector<std::size_t>{0, 3});
}

TEST_CASE("uncompressed defaults to the identity compressor") {
  const auto cfg = parse("method = uncompressed\n");
  CHECK(cfg.method.compressor.kind == CompressorKind::kIdentity);
}

TEST_CASE("invalid configs are rejected") {
  const char* bad[] = {
      "compressor = sign\nlearning_rate = 1\n",
      "compressor = sign\nN = 5\nN = 6\n",
      "compressor = sign\nN = five\n",
      "compressor = sign\nN = -3\n",
      "compressor = sign\np = 1\n",
      "compressor = sign\np = -0.1\n",
      "compressor = sign\ngamma0 = 0\n",
      "compressor = sign\nd = 101\n",
      "compressor = sign\nd = 1,2\n",
      "compressor = sign\nT = 0\n",
      "compressor = sign\njust some words\n",
      "compressor = topk\n",
      "compressor = topk\nk = 101\n",
      "compressor = sign\nk = 3\n",
      "compressor = randk\nk = 2\n",
      "method = unbiased\ncompressor = sign\n",
      "method = uncompressed\ncompressor = topk\nk = 3\n",
      "method = sgd\ncompressor = sign\n",
      "method = cocoef\n",
      "compressor = sign\ngroup_size = 4\ngroups = 0\n",
      "compressor = topk\nk = 2\ngroup_size = 4\n",
      "compressor = sign\nlr_schedule = cosine\n",
      "compressor = sign\ndebug_invariants = maybe\n",
  };
  for (const char* text : bad) {
    INFO(text);
    CHECK_THROWS_AS(parse(text), ConfigError);
  }
}

TEST_CASE("text form round trips") {
  const auto cfg = parse(
      "N = 7\nM = 3\nD = 5\nd = 2,3,7\np = 0.123456789\nmethod = coco\n"
      "compressor = topk\nk = 2\nT = 12\ngamma0 = 1.5e-5\ntrials = 3\nseed = 4\n");
  const std::string text = to_config_text(cfg);
  CHECK(to_config_text(parse(text)) == text);
  const auto sign = parse("D = 5\ncompressor = sign\ngroup_size = 2\n");
  CHECK(to_config_text(parse(to_config_text(sign))) == to_config_text(sign));
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_config("/nonexistent/path/to.cfg"), ConfigError);
}
