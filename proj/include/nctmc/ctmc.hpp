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

#ifndef NCTMC_CTMC_HPP
#define NCTMC_CTMC_HPP

#include <functional>
#include <vector>

#include "nctmc/errors.hpp"

namespace nctmc {

enum class ScheduleKind { kUniform, kMasked };

// Noise schedule for the forward corruption kernel
//   q_{t|0}(. | x0) = alpha_t * e_{x0} + (1 - alpha_t) * reference,
// with alpha_t = 1 - (t/T)^power. The reference distribution is uniform (or
// caller-supplied) for the uniform kind and one-hot on the mask state for the
// masked kind. Rate evaluation requires t <= T - eps_t: the exit rate
// diverges as alpha_t -> 0.
class Schedule {
 public:
  static Schedule uniform(int num_states, double horizon = 1.0, double power = 1.0,
                          double eps_t = -1.0);
  static Schedule uniform_with_reference(std::vector<double> reference, double horizon = 1.0,
                                         double power = 1.0, double eps_t = -1.0);
  /// State space is {0..vocab_size-1} plus the mask state vocab_size.
  static Schedule masked(int vocab_size, double horizon = 1.0, double power = 1.0,
                         double eps_t = -1.0);

  double alpha(double t) const;
  double alpha_prime(double t) const;
  double beta(double t) const { return 1.0 - alpha(t); }
  /// -alpha'_t / alpha_t, the shared scalar factor of all forward rates.
  double rate_scale(double t) const;

  ScheduleKind kind() const { return kind_; }
  int num_states() const { return num_states_; }
  double horizon() const { return horizon_; }
  double eps_t() const { return eps_t_; }
  double power() const { return power_; }
  const std::vector<double>& reference() const { return reference_; }
  int mask_state() const { return mask_state_; }

  /// Usable time window [eps_t, T - eps_t] for model/rate evaluation.
  double t_lo() const { return eps_t_; }
  double t_hi() const { return horizon_ - eps_t_; }
  double clamp_time(double t) const;

  void require_time_in_domain(double t) const;  // [0, T], domain_error otherwise

 private:
  Schedule(ScheduleKind kind, std::vector<double> reference, double horizon, double power,
           double eps_t, int mask_state);

  ScheduleKind kind_;
  int num_states_;
  double horizon_;
  double power_;
  double eps_t_;
  std::vector<double> reference_;
  int mask_state_;  // -1 for uniform kind
};

// Time-indexed rate family. off_diag(t, i, j) is the i->j transition rate for
// i != j; the diagonal is derived so each row sums to zero.
struct RateMatrix {
  int num_states = 0;
  std::function<double(double, int, int)> off_diag;

  double diag(double t, int i) const { return -exit_rate(t, i); }
  double exit_rate(double t, int i) const;
};

/// Exit-rate/jump-distribution pair. zero_rate marks the absorbing sentinel:
/// exit_rate == 0 with an all-zero jump_dist.
struct ExitJump {
  double exit_rate = 0.0;
  std::vector<double> jump_dist;
  bool zero_rate = false;
};

/// Reverse-direction target at one (t, state): per_pair[j] is the reverse
/// rate into j, exit_rate its sum, jump_dist the normalized direction law.
struct ReverseTarget {
  double exit_rate = 0.0;
  std::vector<double> jump_dist;
  std::vector<double> per_pair;
  bool zero_rate = false;
};

/// q_{t|0}(. | x0) as a dense probability vector.
std::vector<double> forward_kernel(const Schedule& schedule, double t, int x0);

/// q_{t|s}(. | i) for 0 <= s <= t <= T.
std::vector<double> transition_kernel(const Schedule& schedule, double s, double t, int i);

/// Rate family consistent with the kernel: off_diag(t,i,j) = rate_scale(t) *
/// reference[j] for i != j. Evaluation throws SingularityError at alpha_t = 0.
RateMatrix rate_from_schedule(const Schedule& schedule);

/// Dense S x S snapshot (diagonal included, rows sum to zero).
std::vector<double> materialize_rate(const RateMatrix& rate, double t);

ExitJump decompose_rate(const RateMatrix& rate, double t, int i);

/// Reconstructed rate lambda * r[j]; zero for the sentinel.
double reconstruct_rate(const ExitJump& ej, int j);

/// Conditional reverse target given clean data x0.
ReverseTarget conditional_reverse(const Schedule& schedule, double t, int x0, int i);

/// Marginal reverse target under a data distribution over clean states.
ReverseTarget marginal_reverse(const Schedule& schedule, const std::vector<double>& p_data,
                               double t, int i);

/// q_t = sum_x0 p_data(x0) q_{t|0}(. | x0).
std::vector<double> marginal_distribution(const Schedule& schedule,
                                          const std::vector<double>& p_data, double t);

/// Shared validation for probability vectors (nonnegative, sums to one).
void require_probability_vector(const std::vector<double>& p, double tol = 1e-9);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace nctmc

#endif  // NCTMC_CTMC_HPP
