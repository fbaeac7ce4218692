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

#ifndef NCTMC_PATH_HPP
#define NCTMC_PATH_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nctmc/ctmc.hpp"
#include "nctmc/model.hpp"
#include "nctmc/rng.hpp"

namespace nctmc {

/// Piecewise-constant trajectory on [0, horizon]: initial state, then ordered
/// (jump time, post-jump state) pairs.
struct Path {
  int initial_state = 0;
  double horizon = 0.0;
  std::vector<std::pair<double, int>> jumps;

  int state_at(double t) const;
  int final_state() const { return jumps.empty() ? initial_state : jumps.back().second; }
  int jump_count() const { return static_cast<int>(jumps.size()); }

  /// Strictly increasing jump times in (0, horizon); no self-jumps.
  void validate() const;

  /// Line record `x0 T n t1 s1 t2 s2 ...`, times with 12 significant digits.
  std::string serialize() const;
  static Path deserialize(const std::string& line);
};

/// log dQ(path) = sum_k log R_{t_k}(x_{k-1}, x_k) - int_0^T lambda_t(X_t) dt.
/// Survival integrals use adaptive quadrature (rel. tol 1e-10) per holding
/// interval. A zero rate at a realized jump yields -inf; the jump index goes
/// to *bad_jump if given.
double log_path_density(const RateMatrix& rate, const Path& path, int* bad_jump = nullptr);

/// Jump-ratio + survival-difference terms of the log Radon-Nikodym derivative
/// restricted to (a, b]; the prior term is excluded. Model times are clamped
/// into its valid window.
double log_rn_segment(const RateMatrix& fwd_rate, const ReverseModel& model, const Path& path,
                      double a, double b);

/// Full log dP_theta/dQ_{x0}: prior term at the final state plus the segment
/// terms over [0, horizon].
double log_rn_derivative(const RateMatrix& fwd_rate, const ReverseModel& model,
                         const std::vector<double>& prior, const Path& path,
                         int* bad_jump = nullptr);

/// Rate source for simulation: exit_rate is the hot query inside hazard
/// integrals (allocation-free), exit_jump is consulted once per realized jump.
struct RateProvider {
  std::function<double(double, int)> exit_rate;
  std::function<ExitJump(double, int)> exit_jump;
};

RateProvider exit_jump_provider(const RateMatrix& rate);
RateProvider model_rate_provider(const ReverseModel& model);

/// Exact time-inhomogeneous Gillespie on [t_start, t_end]: each holding time
/// solves the integrated-hazard equation against a unit exponential draw, by
/// segment accumulation plus bisection to 1e-9 time tolerance; the
/// destination is drawn from the jump distribution at the jump time.
Path gillespie_sample(const RateProvider& rates, int x_init, double t_start, double t_end,
                      Rng& rng);

struct CampbellMeckeResult {
  double mc_estimate = 0.0;
  double analytic = 0.0;
  double std_error = 0.0;
  long n_paths = 0;
};

/// Monte Carlo average of sum_k f(t_k, pre, post) over forward paths from x0
/// on [0, t_end] against the quadrature value
/// int_0^{t_end} sum_i q_{t|0}(i|x0) sum_{j != i} R_t(i,j) f(t,i,j) dt.
CampbellMeckeResult campbell_mecke_check(const RateMatrix& rate, const Schedule& schedule, int x0,
                                         const std::function<double(double, int, int)>& f,
                                         double t_end, long n_paths, Rng& rng);

}  // namespace nctmc

#endif  // NCTMC_PATH_HPP
