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

// Closed-form convergence constants for compressed gradient coding with error
// feedback, plus estimators for the smoothness and heterogeneity constants of
// a linear regression task.
//
// Notation follows the analysis: p straggler probability, delta compressor
// contraction, q_A aggregate discrepancy, vartheta = sum_k (1/d_k - 1/N),
// L smoothness, beta heterogeneity, phi the learning-rate scale with
// gamma = phi / sqrt(T + 1).

#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "gcsim/errors.hpp"
#include "gcsim/tasks.hpp"
#include "gcsim/vector.hpp"

namespace gcsim::theory {

struct TheoryInputs {
  double p = 0.0;
  double delta = 0.0;
  double qa = 0.0;
  std::size_t devices = 1;  // N
  std::size_t subsets = 1;  // M
  double vartheta = 0.0;
  double L = 0.0;
  double beta = 0.0;
  double F0 = 0.0;
  double Fstar = 0.0;
  double phi = 1.0;

  /// Range checks shared by every formula (0 <= p < 1, 0 <= delta < 1, ...).
  void validate() const;
};

/// Thrown when delta >= 0.5 or q_A >= (2 delta + 1) / 2.
class ConditionError : public DomainError {
 public:
  ConditionError(double delta, double qa);
  double delta() const { return delta_; }
  double qa() const { return qa_; }

 private:
  double delta_;
  double qa_;
};

/// Throws ConditionError unless delta < 0.5 and q_A < (2 delta + 1) / 2.
void check_error_bound_conditions(const TheoryInputs& in);

double xi1(const TheoryInputs& in);
double xi2(const TheoryInputs& in);

/// p / ((1-p) N) + 1 + 2 p vartheta / ((1-p) M^2)
double gradient_coefficient(const TheoryInputs& in);

struct Epsilons {
  double eps0 = 0.0;
  double eps1 = 0.0;
  /// The Young's-inequality weight the pair was computed with.
  double rho0 = 0.0;
  /// False when p beta^2 vartheta xi1 = 0 and the fallback rho0 = L was used.
  bool optimized = true;
};

Epsilons epsilons(const TheoryInputs& in, double xi1, double xi2);

struct TheoryConstants {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double eps0 = 0.0;
  double eps1 = 0.0;
  double rho0 = 0.0;
  bool optimized = true;
};

/// xi1, xi2 and the epsilons in one call.
TheoryConstants constants(const TheoryInputs& in);

/// Largest horizon excluded by T > (eps0 phi)^2 - 1.
double min_horizon(const TheoryInputs& in, const Epsilons& eps);

/// Upper bound on (1/(T+1)) sum_{t<=T} ||grad F(theta^t)||^2:
///   eps1 phi / (sqrt(T+1) - eps0 phi) + (F0 - F*) / (phi sqrt(T+1) - eps0 phi^2).
/// Throws DomainError when T <= (eps0 phi)^2 - 1.
double convergence_bound(double T, const TheoryInputs& in, const Epsilons& eps);

/// Bound on E ||sum_i I_i g_i||^2 given ||grad F||^2:
///   2 p beta^2 vartheta / (1-p) + gradient_coefficient * grad_norm_sq.
double second_moment_bound(const TheoryInputs& in, double grad_norm_sq);

/// Bound on sum_{t<=T} ||sum_i e_i^{t+1}||^2:
///   (T+1) gamma^2 xi1 + gamma^2 xi2 sum_t ||grad F(theta^t)||^2.
double error_energy_bound(double T, double gamma, double xi1, double xi2,
                          double sum_grad_norm_sq);

class PowerIterationError : public std::runtime_error {
 public:
  PowerIterationError(std::size_t iterations, double last_rayleigh);
  double last_rayleigh() const { return last_rayleigh_; }

 private:
  double last_rayleigh_;
};

/// Largest eigenvalue of sum_k z_k z_k^T by power iteration.
double estimate_L(const LinearRegressionTask& task, double tolerance = 1e-8,
                  std::size_t max_iterations = 10000);

/// max over probes and k of ||grad f_k(theta) - grad F(theta) / M||.
double estimate_beta(const LinearRegressionTask& task,
                     std::span<const Vector> thetas);

/// Same quantity at one point, from a precomputed M x D gradient table and
/// the full gradient.
double heterogeneity_at(std::span<const double> grad_table,
                        std::span<const double> full_grad, std::size_t subsets);

}  // namespace gcsim::theory
