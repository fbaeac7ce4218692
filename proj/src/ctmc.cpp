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

#include "nctmc/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nctmc/kernels.hpp"

namespace nctmc {

namespace {
constexpr int kMaxStates = 4096;  // keeps brute-force oracles tractable
}

Schedule::Schedule(ScheduleKind kind, std::vector<double> reference, double horizon, double power,
                   double eps_t, int mask_state)
    : kind_(kind),
      num_states_(static_cast<int>(reference.size())),
      horizon_(horizon),
      power_(power),
      eps_t_(eps_t),
      reference_(std::move(reference)),
      mask_state_(mask_state) {
  if (num_states_ < 2) throw std::invalid_argument("Schedule: need at least 2 states");
  if (num_states_ > kMaxStates) throw std::invalid_argument("Schedule: state space too large");
  if (!(horizon_ > 0.0)) throw std::invalid_argument("Schedule: horizon must be positive");
  if (!(power_ > 0.0)) throw std::invalid_argument("Schedule: power must be positive");
  if (eps_t_ < 0.0) eps_t_ = 1e-3 * horizon_;
  if (!(eps_t_ > 0.0 && 2.0 * eps_t_ < horizon_))
    throw std::invalid_argument("Schedule: eps_t must satisfy 0 < 2*eps_t < horizon");
  require_probability_vector(reference_, 1e-12);
  if (kind_ == ScheduleKind::kMasked) {
    if (mask_state_ < 0 || mask_state_ >= num_states_)
      throw std::invalid_argument("Schedule: bad mask state");
    for (int j = 0; j < num_states_; ++j) {
      const double want = (j == mask_state_) ? 1.0 : 0.0;
      if (std::abs(reference_[j] - want) > 0.0)
        throw std::invalid_argument("Schedule: masked kind needs one-hot reference");
    }
  }
}

Schedule Schedule::uniform(int num_states, double horizon, double power, double eps_t) {
  if (num_states < 2) throw std::invalid_argument("Schedule: need at least 2 states");
  std::vector<double> ref(num_states, 1.0 / num_states);
  return Schedule(ScheduleKind::kUniform, std::move(ref), horizon, power, eps_t, -1);
}

Schedule Schedule::uniform_with_reference(std::vector<double> reference, double horizon,
                                          double power, double eps_t) {
  return Schedule(ScheduleKind::kUniform, std::move(reference), horizon, power, eps_t, -1);
}

Schedule Schedule::masked(int vocab_size, double horizon, double power, double eps_t) {
  if (vocab_size < 1) throw std::invalid_argument("Schedule: vocab must be nonempty");
  std::vector<double> ref(vocab_size + 1, 0.0);
  ref[vocab_size] = 1.0;
  return Schedule(ScheduleKind::kMasked, std::move(ref), horizon, power, eps_t, vocab_size);
}

double Schedule::alpha(double t) const {
  require_time_in_domain(t);
  return 1.0 - std::pow(t / horizon_, power_);
}

double Schedule::alpha_prime(double t) const {
  require_time_in_domain(t);
  if (power_ == 1.0) return -1.0 / horizon_;
  if (t == 0.0) return 0.0;
  return -(power_ / horizon_) * std::pow(t / horizon_, power_ - 1.0);
}

double Schedule::rate_scale(double t) const {
  const double a = alpha(t);
  if (!(a > 0.0))
    throw SingularityError("rate diverges at t = " + std::to_string(t) + " (alpha_t = 0)");
  return -alpha_prime(t) / a;
}

double Schedule::clamp_time(double t) const { return std::min(std::max(t, t_lo()), t_hi()); }

void Schedule::require_time_in_domain(double t) const {
  if (!(t >= 0.0 && t <= horizon_))
    throw std::domain_error("time " + std::to_string(t) + " outside [0, " +
                            std::to_string(horizon_) + "]");
}

double RateMatrix::exit_rate(double t, int i) const {
  double acc = 0.0;
  for (int j = 0; j < num_states; ++j) {
    if (j == i) continue;
    acc += off_diag(t, i, j);
  }
  return acc;
}

std::vector<double> forward_kernel(const Schedule& schedule, double t, int x0) {
  schedule.require_time_in_domain(t);
  const int S = schedule.num_states();
  if (x0 < 0 || x0 >= S) throw std::domain_error("forward_kernel: state out of range");
  const double a = schedule.alpha(t);
  std::vector<double> out(S);
  std::vector<double> onehot(S, 0.0);
  onehot[x0] = 1.0;
  kernels::scale_add(out.data(), a, onehot.data(), 1.0 - a, schedule.reference().data(),
                     static_cast<std::size_t>(S));
  return out;
}

std::vector<double> transition_kernel(const Schedule& schedule, double s, double t, int i) {
  schedule.require_time_in_domain(s);
  schedule.require_time_in_domain(t);
  if (t < s) throw std::domain_error("transition_kernel: t < s");
  const int S = schedule.num_states();
  if (i < 0 || i >= S) throw std::domain_error("transition_kernel: state out of range");
  const double as = schedule.alpha(s);
  if (!(as > 0.0)) throw SingularityError("transition_kernel: alpha_s = 0");
  const double a = schedule.alpha(t) / as;
  std::vector<double> out(S);
  std::vector<double> onehot(S, 0.0);
  onehot[i] = 1.0;
  kernels::scale_add(out.data(), a, onehot.data(), 1.0 - a, schedule.reference().data(),
                     static_cast<std::size_t>(S));
  return out;
}

RateMatrix rate_from_schedule(const Schedule& schedule) {
  RateMatrix rate;
  rate.num_states = schedule.num_states();
  const Schedule sched = schedule;  // value copy keeps the closure self-contained
  rate.off_diag = [sched](double t, int i, int j) -> double {
    if (i == j) return 0.0;
    sched.require_time_in_domain(t);
    return sched.rate_scale(t) * sched.reference()[j];
  };
  return rate;
}

std::vector<double> materialize_rate(const RateMatrix& rate, double t) {
  const int S = rate.num_states;
  std::vector<double> m(static_cast<std::size_t>(S) * S, 0.0);
  for (int i = 0; i < S; ++i) {
    double row = 0.0;
    for (int j = 0; j < S; ++j) {
      if (i == j) continue;
      const double v = rate.off_diag(t, i, j);
      m[static_cast<std::size_t>(i) * S + j] = v;
      row += v;
    }
    m[static_cast<std::size_t>(i) * S + i] = -row;
  }
  return m;
}

ExitJump decompose_rate(const RateMatrix& rate, double t, int i) {
  const int S = rate.num_states;
  ExitJump ej;
  ej.jump_dist.assign(S, 0.0);
  std::vector<double> row(S, 0.0);
  for (int j = 0; j < S; ++j) {
    if (j == i) continue;
    row[j] = rate.off_diag(t, i, j);
  }
  ej.exit_rate = kernels::sum(row.data(), row.size());
  if (ej.exit_rate > 0.0) {
    for (int j = 0; j < S; ++j) ej.jump_dist[j] = row[j] / ej.exit_rate;
    ej.jump_dist[i] = 0.0;
  } else {
    ej.exit_rate = 0.0;
    ej.zero_rate = true;
  }
  return ej;
}

double reconstruct_rate(const ExitJump& ej, int j) {
  if (ej.zero_rate) return 0.0;
  return ej.exit_rate * ej.jump_dist[j];
}

namespace {

ReverseTarget reverse_from_weights(const Schedule& schedule, double t, int i,
                                   const std::vector<double>& q) {
  // per_pair[j] = R_t(j, i) * q(j) / q(i), the reverse rate into j.
  const int S = schedule.num_states();
  const double qi = q[i];
  ReverseTarget target;
  target.per_pair.assign(S, 0.0);
  target.jump_dist.assign(S, 0.0);
  const double scale = schedule.rate_scale(t);
  const double into_i = scale * schedule.reference()[i];  // R_t(j, i) for all j != i
  for (int j = 0; j < S; ++j) {
    if (j == i) continue;
    target.per_pair[j] = into_i * q[j] / qi;
  }
  target.exit_rate = kernels::sum(target.per_pair.data(), target.per_pair.size());
  if (target.exit_rate > 0.0) {
    for (int j = 0; j < S; ++j) target.jump_dist[j] = target.per_pair[j] / target.exit_rate;
    target.jump_dist[i] = 0.0;
  } else {
    target.exit_rate = 0.0;
    target.zero_rate = true;
  }
  return target;
}

}  // namespace

ReverseTarget conditional_reverse(const Schedule& schedule, double t, int x0, int i) {
  const int S = schedule.num_states();
  if (i < 0 || i >= S || x0 < 0 || x0 >= S)
    throw std::domain_error("conditional_reverse: state out of range");
  const std::vector<double> q = forward_kernel(schedule, t, x0);
  if (!(q[i] > 0.0))
    throw UnreachableStateError("conditional_reverse: q_{t|0}(i|x0) = 0 at state " +
                                std::to_string(i));
  return reverse_from_weights(schedule, t, i, q);
}

ReverseTarget marginal_reverse(const Schedule& schedule, const std::vector<double>& p_data,
                               double t, int i) {
  const int S = schedule.num_states();
  if (i < 0 || i >= S) throw std::domain_error("marginal_reverse: state out of range");
  const std::vector<double> q = marginal_distribution(schedule, p_data, t);
  if (!(q[i] > 0.0))
    throw UnreachableStateError("marginal_reverse: q_t(i) = 0 at state " + std::to_string(i));
  return reverse_from_weights(schedule, t, i, q);
}

std::vector<double> marginal_distribution(const Schedule& schedule,
                                          const std::vector<double>& p_data, double t) {
  const int S = schedule.num_states();
  if (static_cast<int>(p_data.size()) != S)
    throw std::invalid_argument("marginal_distribution: p_data size mismatch");
  require_probability_vector(p_data);
  // q_t = alpha_t * p_data + beta_t * reference, by linearity of the kernel.
  const double a = schedule.alpha(t);
  std::vector<double> q(S);
  kernels::scale_add(q.data(), a, p_data.data(), 1.0 - a, schedule.reference().data(),
                     static_cast<std::size_t>(S));
  return q;
}

void require_probability_vector(const std::vector<double>& p, double tol) {
  double total = 0.0;
  for (double v : p) {
    if (v < 0.0) throw std::invalid_argument("probability vector has a negative entry");
    total += v;
  }
  if (std::abs(total - 1.0) > tol)
    throw std::invalid_argument("probability vector sums to " + std::to_string(total));
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) acc += std::abs(p[k] - q[k]);
  return 0.5 * acc;
}

}  // namespace nctmc
