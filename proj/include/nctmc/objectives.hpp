// Copyright 2026-present the nctmc project
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

#ifndef NCTMC_OBJECTIVES_HPP
#define NCTMC_OBJECTIVES_HPP

#include <string>
#include <vector>

#include "nctmc/ctmc.hpp"
#include "nctmc/model.hpp"
#include "nctmc/rng.hpp"

namespace nctmc {

// Per-sample objective split: a timing (Poisson) part, a direction part, and
// a theta-independent constant, with total = poisson + direction + constant.
// offending_state records the destination of an absolute-continuity violation
// when a term is an infinity sentinel.
struct LossBreakdown {
  double poisson_term = 0.0;
  double direction_term = 0.0;
  double constant_term = 0.0;
  double total = 0.0;
  int offending_state = -1;

  std::string to_json() const;  // {"poisson":..,"direction":..,"constant":..,"total":..}
};

enum class Objective { kCondStable, kKl, kConditional };

Objective objective_from_string(const std::string& name);
std::string objective_name(Objective obj);

/// lambda*log(lambda/model) - lambda + model, with 0 log 0 = 0.
double poisson_kl(double lam_true, double lam_model);

/// sum_j r_true[j] log(r_true[j]/r_model[j]); +inf sentinel on an
/// absolute-continuity violation (offending index reported if requested).
double categorical_kl(const std::vector<double>& r_true, const std::vector<double>& r_model,
                      int* offending = nullptr);

/// Poisson KL density f(r, c) = r log(r/c) - r + c.
double bregman_density(double r, double c);

/// Timing/direction split of one reverse-rate row:
/// sum_j f(target_rate_j, model_rate_j) = KL^Poi + lambda_hat * KL^Cat.
LossBreakdown decompose_row_kl(const ReverseTarget& target, const ExitJump& model_out);

/// Single-sample losses at (x0, t, x_t); all three share gradients and differ
/// only by theta-free constants.
LossBreakdown loss_conditional(const Schedule& schedule, const ReverseModel& model, int x0,
                               double t, int x_t);
LossBreakdown loss_kl(const Schedule& schedule, const ReverseModel& model, int x0, double t,
                      int x_t);
LossBreakdown loss_cond_stable(const Schedule& schedule, const ReverseModel& model, int x0,
                               double t, int x_t);

/// Generic single-sample loss through the Objective selector.
LossBreakdown loss_sample(Objective obj, const Schedule& schedule, const ReverseModel& model,
                          int x0, double t, int x_t);

/// Gradient of the selected loss total w.r.t. one position's heads, for
/// chaining through TwoHeadModel::backward. All objectives yield the same
/// parameter gradient after the simplex projection inside the model.
HeadGradient loss_head_gradient(Objective obj, const Schedule& schedule, int x0, double t, int x_t,
                                const ExitJump& heads);

/// Masked-process cross-entropy loss; zero off the mask state.
double mdlm_loss(const Schedule& masked_schedule, double t, int x0, int x_t,
                 const std::vector<double>& clean_prediction);

// Exact enumeration + quadrature report for the conditional-vs-marginal gap.
struct GapReport {
  double l_kl_value = 0.0;
  double marginal_kl_value = 0.0;
  double c_gap = 0.0;
  std::vector<double> t_nodes;
  std::vector<double> t_weights;
  // per node: S*S row-major Jensen gaps (diagonal zero)
  std::vector<std::vector<double>> per_pair_delta;
  double min_delta = 0.0;
};

GapReport compute_gap(const Schedule& schedule, const std::vector<double>& p_data,
                      const ReverseModel& model, int quad_points);

/// Exact parameter gradient of the conditional objective or the marginal
/// reverse-process KL, both on compute_gap's quadrature grid.
enum class GapSide { kConditional, kMarginal };
std::vector<double> gap_objective_gradient(const Schedule& schedule,
                                           const std::vector<double>& p_data,
                                           const TwoHeadModel& model, int quad_points,
                                           GapSide side);

/// Monte Carlo estimate of the decomposed marginal objective (Poisson KL +
/// lambda_hat * cross-entropy) using exact reverse targets; scaled by the
/// width of the sampled t-interval so it estimates the integrated value.
double mc_marginal_loss(const Schedule& schedule, const std::vector<double>& p_data,
                        const ReverseModel& model, long n_samples, Rng& rng);

/// Theorem-1 conditional upper bound for -log p_theta(x0) on the horizon
/// [0, t_hi], with the reverse-chain prior given by the schedule reference.
double conditional_elbo(const Schedule& schedule, const ReverseModel& model, int x0, double t_hi);

}  // namespace nctmc

#endif  // NCTMC_OBJECTIVES_HPP
