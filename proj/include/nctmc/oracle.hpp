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

#ifndef NCTMC_ORACLE_HPP
#define NCTMC_ORACLE_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include "nctmc/ctmc.hpp"
#include "nctmc/model.hpp"

// Brute-force reference computations, kept independent of the code paths they
// check: kernel vs master-equation integration, loss vs loss, Monte Carlo vs
// exact enumeration. Exact objectives cost O(S^2 * quad_points * |supp|).
namespace nctmc {

struct MarginalTable {
  std::vector<double> t_grid;
  int num_states = 0;
  std::vector<std::vector<double>> q;          // per time: S marginals
  std::vector<std::vector<double>> posterior;  // per time: S x S, rows p(x0 | x_t = i)

  /// CSV rows `t,state,q,posterior_0,...,posterior_{S-1}`.
  void to_csv(std::ostream& os) const;
};

/// Exact sums over the data support plus Bayes-rule posteriors.
MarginalTable exact_marginals(const Schedule& schedule, const std::vector<double>& p_data,
                              const std::vector<double>& t_grid);

/// RK4 integration of dq/dt = q R_t from q0 at t0; renormalized each step
/// with the largest pre-renormalization drift reported via *max_drift.
std::vector<double> integrate_master_equation(const RateMatrix& rate, std::vector<double> q0,
                                              double t0, double t_end, double step,
                                              double* max_drift = nullptr);

/// -log p_theta(x0) for the model's reverse chain started from the schedule
/// reference at t_hi, by dense Euler transition products at grid_size steps,
/// Richardson-extrapolated against the doubled grid.
double exact_nll_small_chain(const Schedule& schedule, const ReverseModel& model, int x0,
                             int grid_size, double t_hi);

/// Central finite differences of `loss` at the sampled coordinates.
std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& loss,
    const std::vector<double>& params, const std::vector<int>& coords, double step);

}  // namespace nctmc

#endif  // NCTMC_ORACLE_HPP
