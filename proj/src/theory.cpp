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

#include "gcsim/theory.hpp"

#include <cmath>
#include <sstream>

#include "gcsim/rng.hpp"

namespace gcsim::theory {
namespace {

double sq(double x) { return x * x; }

// a = (1-p)(2 delta + 1)/2 + p, the contraction of the error recursion.
double outer_rate(const TheoryInputs& in) {
  return (1.0 - in.p) * (2.0 * in.delta + 1.0) / 2.0 + in.p;
}

// b = 2 (1-p) delta + p.
double inner_rate(const TheoryInputs& in) {
  return 2.0 * (1.0 - in.p) * in.delta + in.p;
}

// (4 delta + 2) * scale * delta * p / b; both vanish together as delta, p -> 0
// and the ratio tends to 0 there.
double delta_p_ratio(const TheoryInputs& in, double scale) {
  const double b = inner_rate(in);
  if (b == 0.0) return 0.0;
  return (4.0 * in.delta + 2.0) * scale * in.delta * in.p / b;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void TheoryInputs::validate() const {
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError("theory: p must lie in [0, 1)");
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw ConfigError("theory: delta must lie in [0, 1)");
  }
  if (!(qa >= 0.0)) throw ConfigError("theory: q_A must be >= 0");
  if (!(vartheta >= 0.0)) throw ConfigError("theory: vartheta must be >= 0");
  if (!(L >= 0.0) || !(beta >= 0.0)) {
    throw ConfigError("theory: L and beta must be >= 0");
  }
  if (devices < 1 || subsets < 1) throw ConfigError("theory: N, M must be >= 1");
  if (!(F0 >= Fstar)) throw ConfigError("theory: F(theta^0) must be >= F*");
  if (!(phi > 0.0)) throw ConfigError("theory: phi must be > 0");
}

ConditionError::ConditionError(double delta, double qa)
    : DomainError("error-energy bound conditions unsatisfied: need delta < 0.5 "
                  "and q_A < (2 delta + 1)/2, got delta=" + fmt(delta) +
                  ", q_A=" + fmt(qa) + ", (2 delta + 1)/2=" +
                  fmt((2.0 * delta + 1.0) / 2.0)),
      delta_(delta),
      qa_(qa) {}

void check_error_bound_conditions(const TheoryInputs& in) {
  if (!(in.delta < 0.5) || !(in.qa < (2.0 * in.delta + 1.0) / 2.0)) {
    throw ConditionError(in.delta, in.qa);
  }
}

double gradient_coefficient(const TheoryInputs& in) {
  const double n = static_cast<double>(in.devices);
  const double m = static_cast<double>(in.subsets);
  return in.p / ((1.0 - in.p) * n) + 1.0 +
         2.0 * in.p * in.vartheta / ((1.0 - in.p) * m * m);
}

double xi1(const TheoryInputs& in) {
  in.validate();
  check_error_bound_conditions(in);
  const double b2 = sq(in.beta);
  const double first = 8.0 * b2 * in.p * in.delta * in.vartheta / (1.0 - in.p);
  const double second =
      delta_p_ratio(in, 4.0) * b2 * in.vartheta / (1.0 - inner_rate(in));
  return (first + second) / (1.0 - outer_rate(in));
}

double xi2(const TheoryInputs& in) {
  in.validate();
  check_error_bound_conditions(in);
  const double n = static_cast<double>(in.devices);
  const double m = static_cast<double>(in.subsets);
  const double spread = 1.0 / n + 2.0 * in.vartheta / (m * m);
  const double a = outer_rate(in);
  const double b = inner_rate(in);
  const double first = 4.0 * in.p * in.delta / (1.0 - in.p) * spread;
  const double second = in.qa * (2.0 * in.delta + 1.0) /
                        ((1.0 - in.p) * (2.0 * in.delta + 1.0 - 2.0 * in.qa));
  const double third = a * delta_p_ratio(in, 2.0) * spread / (a - b);
  return (first + second + third) / (1.0 - a);
}

Epsilons epsilons(const TheoryInputs& in, double xi1, double xi2) {
  in.validate();
  const double c = gradient_coefficient(in);
  const double noise = 2.0 * in.p * sq(in.beta) * in.vartheta / (1.0 - in.p);
  Epsilons out;
  if (in.p > 0.0 && in.beta > 0.0 && in.vartheta > 0.0 && xi1 > 0.0) {
    const double pbv = in.p * sq(in.beta) * in.vartheta;
    out.eps0 = in.L / 2.0 * c +
               in.L * xi2 * in.beta * std::sqrt(in.p * in.vartheta) /
                   std::sqrt(2.0 * xi1 * (1.0 - in.p)) +
               in.L * std::sqrt(xi1 * (1.0 - in.p)) / (2.0 * std::sqrt(2.0 * pbv)) * c;
    out.eps1 = std::sqrt(2.0 * sq(in.L) * xi1 * pbv / (1.0 - in.p)) +
               in.L * pbv / (1.0 - in.p);
    out.rho0 = std::sqrt(sq(in.L) * xi1 * (1.0 - in.p) / (2.0 * pbv));
    out.optimized = true;
    return out;
  }
  // The optimal rho0 degenerates; any rho0 > 0 gives a valid pair.
  const double rho0 = in.L > 0.0 ? in.L : 1.0;
  out.eps0 = (in.L + rho0) / 2.0 * c + sq(in.L) * xi2 / (2.0 * rho0);
  out.eps1 = sq(in.L) * xi1 / (2.0 * rho0) + (in.L + rho0) / 2.0 * noise;
  out.rho0 = rho0;
  out.optimized = false;
  return out;
}

TheoryConstants constants(const TheoryInputs& in) {
  TheoryConstants out;
  out.xi1 = xi1(in);
  out.xi2 = xi2(in);
  const Epsilons eps = epsilons(in, out.xi1, out.xi2);
  out.eps0 = eps.eps0;
  out.eps1 = eps.eps1;
  out.rho0 = eps.rho0;
  out.optimized = eps.optimized;
  return out;
}

double min_horizon(const TheoryInputs& in, const Epsilons& eps) {
  return sq(eps.eps0 * in.phi) - 1.0;
}

double convergence_bound(double T, const TheoryInputs& in, const Epsilons& eps) {
  in.validate();
  if (!(T > min_horizon(in, eps))) {
    throw DomainError("horizon too short for the convergence bound: need T > " +
                      fmt(min_horizon(in, eps)) + ", got T=" + fmt(T));
  }
  const double root = std::sqrt(T + 1.0);
  return eps.eps1 * in.phi / (root - eps.eps0 * in.phi) +
         (in.F0 - in.Fstar) / (in.phi * root - eps.eps0 * sq(in.phi));
}

double second_moment_bound(const TheoryInputs& in, double grad_norm_sq) {
  if (!(in.p >= 0.0 && in.p < 1.0)) throw ConfigError("theory: p must lie in [0, 1)");
  return 2.0 * in.p * sq(in.beta) * in.vartheta / (1.0 - in.p) +
         gradient_coefficient(in) * grad_norm_sq;
}

double error_energy_bound(double T, double gamma, double xi1, double xi2,
                          double sum_grad_norm_sq) {
  return (T + 1.0) * sq(gamma) * xi1 + sq(gamma) * xi2 * sum_grad_norm_sq;
}

PowerIterationError::PowerIterationError(std::size_t iterations,
                                         double last_rayleigh)
    : std::runtime_error("power iteration did not converge after " +
                         std::to_string(iterations) +
                         " iterations; last Rayleigh quotient " + fmt(last_rayleigh)),
      last_rayleigh_(last_rayleigh) {}

double estimate_L(const LinearRegressionTask& task, double tolerance,
                  std::size_t max_iterations) {
  const std::size_t dim = task.dim();
  // H v = sum_k z_k <z_k, v>
  auto apply = [&](std::span<const double> v) {
    Vector out(dim, 0.0);
    for (std::size_t k = 0; k < task.subsets(); ++k) {
      axpy(dot(task.feature(k), v), task.feature(k), out);
    }
    return out;
  };
  RandomStream rng(0x5eed, StreamTag::kProbe);
  Vector v(dim);
  for (double& x : v) x = rng.normal();
  double len = norm(v);
  for (double& x : v) x /= len;

  double rayleigh = 0.0;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    Vector hv = apply(v);
    const double next = dot(v, hv);
    len = norm(hv);
    if (len == 0.0) return 0.0;  // H = 0
    for (std::size_t j = 0; j < dim; ++j) v[j] = hv[j] / len;
    if (it > 1 && std::abs(next - rayleigh) <= tolerance * std::abs(next)) {
      return dot(v, apply(v));
    }
    rayleigh = next;
  }
  throw PowerIterationError(max_iterations, rayleigh);
}

double heterogeneity_at(std::span<const double> grad_table,
                        std::span<const double> full_grad, std::size_t subsets) {
  const std::size_t dim = full_grad.size();
  const double inv_m = 1.0 / static_cast<double>(subsets);
  double worst = 0.0;
  for (std::size_t k = 0; k < subsets; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double diff = grad_table[k * dim + j] - inv_m * full_grad[j];
      s += diff * diff;
    }
    worst = std::max(worst, s);
  }
  return std::sqrt(worst);
}

double estimate_beta(const LinearRegressionTask& task,
                     std::span<const Vector> thetas) {
  if (thetas.empty()) throw ConfigError("estimate_beta: empty probe set");
  double worst = 0.0;
  for (const auto& theta : thetas) {
    const auto table = task.subset_gradients(theta);
    const Vector full = task.full_gradient(theta);
    worst = std::max(worst, heterogeneity_at(table, full, task.subsets()));
  }
  return worst;
}

}  // namespace gcsim::theory
