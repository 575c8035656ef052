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

#include "gcsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "gcsim/format.hpp"

namespace gcsim {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream is(s);
  while (std::getline(is, part, sep)) parts.push_back(trim(part));
  return parts;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" +
                      text + "'");
  }
  return v;
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    return parse_double(text);
  } catch (const ConfigError&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + text + "'");
}

const std::vector<std::string> kKnownKeys = {
    "N",          "M",           "D",      "d",           "p",
    "method",     "compressor",  "k",      "group_size",  "groups",
    "T",          "gamma0",      "lr_schedule", "trials", "seed",
    "emit_theory", "debug_invariants", "invariant_tolerance"};

}  // namespace

std::string to_string(LrSchedule schedule) {
  return schedule == LrSchedule::kConstant ? "constant" : "invsqrt";
}

std::vector<std::size_t> ExperimentConfig::replication_per_subset() const {
  if (replication.size() == 1) return std::vector<std::size_t>(subsets, replication[0]);
  return replication;
}

double ExperimentConfig::learning_rate(std::size_t t) const {
  if (lr_schedule == LrSchedule::kInvSqrt) {
    return gamma0 / std::sqrt(static_cast<double>(t) + 1.0);
  }
  return gamma0;
}

void ExperimentConfig::validate() const {
  if (devices < 1 || subsets < 1 || dim < 1) {
    throw ConfigError("config: N, M and D must be >= 1");
  }
  if (iterations < 1 || trials < 1) {
    throw ConfigError("config: T and trials must be >= 1");
  }
  if (!(p >= 0.0 && p < 1.0)) {
    throw ConfigError("config: p must lie in [0, 1); p = 1 leaves no device responding");
  }
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
    throw ConfigError("config: gamma0 must be > 0");
  }
  if (replication.size() != 1 && replication.size() != subsets) {
    throw ConfigError("config: d must be one value or M values");
  }
  for (std::size_t d : replication) {
    if (d < 1 || d > devices) throw ConfigError("config: every d_k must lie in [1, N]");
  }
  if (method.compressor.dim != dim) {
    throw ConfigError("config: compressor dimension does not match D");
  }
  if (!(invariant_tolerance > 0.0)) {
    throw ConfigError("config: invariant_tolerance must be > 0");
  }
  method.validate();
}

ExperimentConfig parse_config(std::istream& is) {
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" +
                        key + "'");
    }
    if (!values.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" +
                        key + "'");
    }
  }

  auto get = [&](const std::string& key) -> std::optional<std::string> {
    if (auto it = values.find(key); it != values.end()) return it->second;
    return std::nullopt;
  };

  ExperimentConfig cfg;
  if (auto v = get("N")) cfg.devices = parse_uint("N", *v);
  if (auto v = get("M")) cfg.subsets = parse_uint("M", *v);
  if (auto v = get("D")) cfg.dim = parse_uint("D", *v);
  if (auto v = get("d")) {
    cfg.replication.clear();
    for (const auto& part : split(*v, ',')) cfg.replication.push_back(parse_uint("d", part));
  }
  if (auto v = get("p")) cfg.p = parse_real("p", *v);
  if (auto v = get("T")) cfg.iterations = parse_uint("T", *v);
  if (auto v = get("gamma0")) cfg.gamma0 = parse_real("gamma0", *v);
  if (auto v = get("lr_schedule")) {
    if (*v == "constant") {
      cfg.lr_schedule = LrSchedule::kConstant;
    } else if (*v == "invsqrt") {
      cfg.lr_schedule = LrSchedule::kInvSqrt;
    } else {
      throw ConfigError("config: lr_schedule must be constant or invsqrt");
    }
  }
  if (auto v = get("trials")) cfg.trials = parse_uint("trials", *v);
  if (auto v = get("seed")) cfg.seed = parse_uint("seed", *v);
  if (auto v = get("emit_theory")) cfg.emit_theory = parse_bool("emit_theory", *v);
  if (auto v = get("debug_invariants")) {
    cfg.debug_invariants = parse_bool("debug_invariants", *v);
  }
  if (auto v = get("invariant_tolerance")) {
    cfg.invariant_tolerance = parse_real("invariant_tolerance", *v);
  }

  const MethodKind method = method_kind_from_string(get("method").value_or("cocoef"));
  std::string compressor_name;
  if (auto v = get("compressor")) {
    compressor_name = *v;
  } else if (method == MethodKind::kUncompressed) {
    compressor_name = "identity";
  } else {
    throw ConfigError("config: 'compressor' is required for method " + to_string(method));
  }
  const CompressorKind kind = compressor_kind_from_string(compressor_name);
  const auto k = get("k");
  const auto group_size = get("group_size");
  const auto groups = get("groups");
  CompressorSpec spec;
  switch (kind) {
    case CompressorKind::kGroupedSignBit:
      if (group_size && groups) {
        throw ConfigError("config: give either group_size or groups, not both");
      }
      if (groups) {
        std::vector<std::vector<std::size_t>> parsed;
        for (const auto& g : split(*groups, ';')) {
          std::vector<std::size_t> group;
          for (const auto& idx : split(g, ',')) group.push_back(parse_uint("groups", idx));
          parsed.push_back(std::move(group));
        }
        spec = CompressorSpec::grouped_sign(cfg.dim, std::move(parsed));
      } else {
        spec = CompressorSpec::grouped_sign(
            cfg.dim, group_size ? parse_uint("group_size", *group_size) : cfg.dim);
      }
      break;
    case CompressorKind::kTopK:
    case CompressorKind::kAmplifiedRandK: {
      if (!k) throw ConfigError("config: compressor " + compressor_name + " needs k");
      const std::size_t kept = parse_uint("k", *k);
      spec = kind == CompressorKind::kTopK ? CompressorSpec::top_k(cfg.dim, kept)
                                           : CompressorSpec::rand_k(cfg.dim, kept);
      break;
    }
    case CompressorKind::kStochasticSignBit:
      spec = CompressorSpec::stochastic_sign(cfg.dim);
      break;
    case CompressorKind::kIdentity:
      spec = CompressorSpec::identity(cfg.dim);
      break;
  }
  if (kind != CompressorKind::kGroupedSignBit && (group_size || groups)) {
    throw ConfigError("config: group_size/groups only apply to the sign compressor");
  }
  if (kind != CompressorKind::kTopK && kind != CompressorKind::kAmplifiedRandK && k) {
    throw ConfigError("config: k only applies to topk/randk");
  }
  cfg.method = MethodSpec{method, std::move(spec)};
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string to_config_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "N = " << cfg.devices << "\nM = " << cfg.subsets << "\nD = " << cfg.dim
     << "\nd = ";
  for (std::size_t i = 0; i < cfg.replication.size(); ++i) {
    os << (i ? "," : "") << cfg.replication[i];
  }
  os << "\np = " << format_double(cfg.p) << "\nmethod = " << to_string(cfg.method.kind)
     << "\ncompressor = " << to_string(cfg.method.compressor.kind) << '\n';
  const auto& c = cfg.method.compressor;
  if (c.kind == CompressorKind::kTopK || c.kind == CompressorKind::kAmplifiedRandK) {
    os << "k = " << c.k << '\n';
  } else if (c.kind == CompressorKind::kGroupedSignBit) {
    os << "groups = ";
    for (std::size_t g = 0; g < c.groups.size(); ++g) {
      os << (g ? ";" : "");
      for (std::size_t j = 0; j < c.groups[g].size(); ++j) {
        os << (j ? "," : "") << c.groups[g][j];
      }
    }
    os << '\n';
  }
  os << "T = " << cfg.iterations << "\ngamma0 = " << format_double(cfg.gamma0)
     << "\nlr_schedule = " << to_string(cfg.lr_schedule) << "\ntrials = " << cfg.trials
     << "\nseed = " << cfg.seed << "\nemit_theory = " << (cfg.emit_theory ? "true" : "false")
     << "\ndebug_invariants = " << (cfg.debug_invariants ? "true" : "false")
     << "\ninvariant_tolerance = " << format_double(cfg.invariant_tolerance) << '\n';
  return os.str();
}

}  // namespace gcsim
