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

#include "nctmc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace nctmc {

void MarginalTable::to_csv(std::ostream& os) const {
  os << "t,state,q";
  for (int j = 0; j < num_states; ++j) os << ",posterior_" << j;
  os << '\n';
  char buf[40];
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    for (int i = 0; i < num_states; ++i) {
      std::snprintf(buf, sizeof(buf), "%.12g", t_grid[k]);
      os << buf << ',' << i;
      std::snprintf(buf, sizeof(buf), ",%.12g", q[k][i]);
      os << buf;
      for (int j = 0; j < num_states; ++j) {
        std::snprintf(buf, sizeof(buf), ",%.12g",
                      posterior[k][static_cast<std::size_t>(i) * num_states + j]);
        os << buf;
      }
      os << '\n';
    }
  }
}

MarginalTable exact_marginals(const Schedule& schedule, const std::vector<double>& p_data,
                              const std::vector<double>& t_grid) {
  const int S = schedule.num_states();
  require_probability_vector(p_data);
  MarginalTable table;
  table.t_grid = t_grid;
  table.num_states = S;
  for (double t : t_grid) {
    std::vector<double> q(S, 0.0);
    std::vector<double> post(static_cast<std::size_t>(S) * S, 0.0);
    for (int x0 = 0; x0 < S; ++x0) {
      if (p_data[x0] == 0.0) continue;
      const std::vector<double> cond = forward_kernel(schedule, t, x0);
      for (int i = 0; i < S; ++i) {
        q[i] += p_data[x0] * cond[i];
        post[static_cast<std::size_t>(i) * S + x0] = p_data[x0] * cond[i];
      }
    }
    for (int i = 0; i < S; ++i) {
      if (q[i] > 0.0) {
        for (int x0 = 0; x0 < S; ++x0) post[static_cast<std::size_t>(i) * S + x0] /= q[i];
      }
    }
    table.q.push_back(std::move(q));
    table.posterior.push_back(std::move(post));
  }
  return table;
}

namespace {

// d(j) = sum_{i != j} q_i R(i,j) - q_j lambda(j)
void master_derivative(const RateMatrix& rate, double t, const std::vector<double>& q,
                       std::vector<double>& d) {
  const int S = rate.num_states;
  d.assign(S, 0.0);
  for (int i = 0; i < S; ++i) {
    double exit = 0.0;
    for (int j = 0; j < S; ++j) {
      if (j == i) continue;
      const double r = rate.off_diag(t, i, j);
      d[j] += q[i] * r;
      exit += r;
    }
    d[i] -= q[i] * exit;
  }
}

}  // namespace

std::vector<double> integrate_master_equation(const RateMatrix& rate, std::vector<double> q0,
                                              double t0, double t_end, double step,
                                              double* max_drift) {
  if (!(step > 0.0 && step <= 1e-3))
    throw std::invalid_argument("integrate_master_equation: step must be in (0, 1e-3]");
  if (t_end < t0) throw std::invalid_argument("integrate_master_equation: t_end < t0");
  const int S = rate.num_states;
  std::vector<double> q = std::move(q0);
  std::vector<double> k1(S), k2(S), k3(S), k4(S), tmp(S);
  double drift = 0.0;
  double t = t0;
  while (t < t_end - 1e-15) {
    const double h = std::min(step, t_end - t);
    master_derivative(rate, t, q, k1);
    for (int i = 0; i < S; ++i) tmp[i] = q[i] + 0.5 * h * k1[i];
    master_derivative(rate, t + 0.5 * h, tmp, k2);
    for (int i = 0; i < S; ++i) tmp[i] = q[i] + 0.5 * h * k2[i];
    master_derivative(rate, t + 0.5 * h, tmp, k3);
    for (int i = 0; i < S; ++i) tmp[i] = q[i] + h * k3[i];
    master_derivative(rate, t + h, tmp, k4);
    for (int i = 0; i < S; ++i) q[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    double total = 0.0;
    for (double v : q) total += v;
    drift = std::max(drift, std::abs(total - 1.0));
    for (double& v : q) v /= total;
    t += h;
  }
  if (max_drift) *max_drift = drift;
  return q;
}

namespace {

double reverse_chain_nll(const Schedule& schedule, const ReverseModel& model, int x0, int steps,
                         double t_hi) {
  const int S = schedule.num_states();
  const double h = t_hi / steps;
  std::vector<double> dist = schedule.reference();
  std::vector<double> next(S);
  for (int n = steps; n >= 1; --n) {
    const double t = n * h;
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < S; ++i) {
      if (dist[i] == 0.0) continue;
      const ExitJump heads = model.forward_clamped(std::vector<int>{i}, t).per_position.at(0);
      const double lam = heads.zero_rate ? 0.0 : heads.exit_rate;
      const double stay = 1.0 - lam * h;
      if (stay < 0.0)
        throw std::runtime_error("exact_nll_small_chain: step too coarse for the model rates");
      next[i] += dist[i] * stay;
      if (lam > 0.0) {
        for (int j = 0; j < S; ++j) {
          if (j == i) continue;
          next[j] += dist[i] * lam * heads.jump_dist[j] * h;
        }
      }
    }
    dist.swap(next);
  }
  const double p = dist[x0];
  if (!(p > 0.0)) return std::numeric_limits<double>::infinity();
  return -std::log(p);
}

}  // namespace

double exact_nll_small_chain(const Schedule& schedule, const ReverseModel& model, int x0,
                             int grid_size, double t_hi) {
  if (schedule.num_states() > 4)
    throw std::invalid_argument("exact_nll_small_chain: supported for S <= 4");
  if (grid_size < 10000)
    throw std::invalid_argument("exact_nll_small_chain: grid_size must be >= 1e4");
  const double coarse = reverse_chain_nll(schedule, model, x0, grid_size, t_hi);
  const double fine = reverse_chain_nll(schedule, model, x0, 2 * grid_size, t_hi);
  // first-order Richardson: Euler's O(h) error cancels
  return 2.0 * fine - coarse;
}

std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& loss,
    const std::vector<double>& params, const std::vector<int>& coords, double step) {
  if (!(step >= 1e-8 && step <= 1e-4))
    throw std::invalid_argument("finite_difference_gradient: step must be in [1e-8, 1e-4]");
  std::vector<double> grad(coords.size(), 0.0);
  std::vector<double> p = params;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const int c = coords[k];
    const double orig = p[c];
    p[c] = orig + step;
    const double up = loss(p);
    p[c] = orig - step;
    const double down = loss(p);
    p[c] = orig;
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

}  // namespace nctmc
