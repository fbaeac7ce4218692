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

#include "nctmc/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "nctmc/kernels.hpp"
#include "nctmc/quadrature.hpp"

namespace nctmc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// K(a) = a (log a - 1), K(0) = 0
inline double k_term(double a) { return a > 0.0 ? a * (std::log(a) - 1.0) : 0.0; }
}  // namespace

std::string LossBreakdown::to_json() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "{\"poisson\":%.17g,\"direction\":%.17g,\"constant\":%.17g,\"total\":%.17g}",
                poisson_term, direction_term, constant_term, total);
  return buf;
}

Objective objective_from_string(const std::string& name) {
  if (name == "cond_stable") return Objective::kCondStable;
  if (name == "kl") return Objective::kKl;
  if (name == "conditional") return Objective::kConditional;
  throw std::invalid_argument("unknown objective: " + name);
}

std::string objective_name(Objective obj) {
  switch (obj) {
    case Objective::kCondStable:
      return "cond_stable";
    case Objective::kKl:
      return "kl";
    case Objective::kConditional:
      return "conditional";
  }
  return "?";
}

double poisson_kl(double lam_true, double lam_model) {
  if (lam_true < 0.0) throw std::domain_error("poisson_kl: negative true rate");
  if (!(lam_model > 0.0)) throw std::domain_error("poisson_kl: model rate must be positive");
  if (lam_true == 0.0) return lam_model;
  return lam_true * std::log(lam_true / lam_model) - lam_true + lam_model;
}

double categorical_kl(const std::vector<double>& r_true, const std::vector<double>& r_model,
                      int* offending) {
  if (r_true.size() != r_model.size())
    throw std::invalid_argument("categorical_kl: size mismatch");
  if (offending) *offending = -1;
  double acc = 0.0;
  for (std::size_t j = 0; j < r_true.size(); ++j) {
    if (r_true[j] <= 0.0) continue;
    if (!(r_model[j] > 0.0)) {
      if (offending) *offending = static_cast<int>(j);
      return kInf;
    }
    acc += r_true[j] * std::log(r_true[j] / r_model[j]);
  }
  return acc;
}

double bregman_density(double r, double c) { return poisson_kl(r, c); }

LossBreakdown decompose_row_kl(const ReverseTarget& target, const ExitJump& model_out) {
  LossBreakdown out;
  const double lam_hat = target.exit_rate;
  const double lam = model_out.exit_rate;
  if (lam_hat == 0.0) {
    out.poisson_term = lam;
    out.total = lam;
    return out;
  }
  if (!(lam > 0.0)) {
    out.poisson_term = kInf;
    out.total = kInf;
    return out;
  }
  out.poisson_term = poisson_kl(lam_hat, lam);
  int off = -1;
  out.direction_term = lam_hat * categorical_kl(target.jump_dist, model_out.jump_dist, &off);
  out.offending_state = off;
  // the same row summed pairwise: sum_j f(target_rate_j, model_rate_j)
  double total = 0.0;
  for (std::size_t j = 0; j < target.per_pair.size(); ++j) {
    const double r = target.per_pair[j];
    const double c = reconstruct_rate(model_out, j);
    if (r == 0.0) {
      total += c;
      continue;
    }
    if (!(c > 0.0)) {
      out.offending_state = static_cast<int>(j);
      out.total = kInf;
      return out;
    }
    total += r * std::log(r / c) - r + c;
  }
  out.total = total;
  return out;
}

namespace {

struct SampleContext {
  ReverseTarget target;  // conditional reverse at (t, x_t | x0)
  ExitJump heads;
};

SampleContext sample_context(const Schedule& schedule, const ReverseModel& model, int x0, double t,
                             int x_t) {
  SampleContext ctx;
  ctx.target = conditional_reverse(schedule, t, x0, x_t);
  ctx.heads = model.forward_clamped(std::vector<int>{x_t}, t).per_position.at(0);
  return ctx;
}

}  // namespace

LossBreakdown loss_conditional(const Schedule& schedule, const ReverseModel& model, int x0,
                               double t, int x_t) {
  const SampleContext ctx = sample_context(schedule, model, x0, t, x_t);
  const double lam_hat = ctx.target.exit_rate;
  const double lam = ctx.heads.exit_rate;
  LossBreakdown out;
  if (lam_hat == 0.0) {
    out.poisson_term = lam;
    out.total = lam;
    return out;
  }
  if (!(lam > 0.0)) {
    out.poisson_term = kInf;
    out.total = kInf;
    return out;
  }
  double cross = 0.0;  // -sum_j target_rate_j log(lam * r_j)
  for (std::size_t j = 0; j < ctx.target.per_pair.size(); ++j) {
    const double r = ctx.target.per_pair[j];
    if (r == 0.0) continue;
    const double c = reconstruct_rate(ctx.heads, static_cast<int>(j));
    if (!(c > 0.0)) {
      out.offending_state = static_cast<int>(j);
      out.total = kInf;
      out.poisson_term = kInf;
      return out;
    }
    cross -= r * std::log(c);
  }
  out.total = cross - lam_hat + lam;
  out.poisson_term = poisson_kl(lam_hat, lam);
  // cross-entropy part plus the theta-free -lambda_hat log lambda_hat; the
  // dropped "+const" keeps constant_term at zero.
  out.direction_term = out.total - out.poisson_term;
  return out;
}

LossBreakdown loss_kl(const Schedule& schedule, const ReverseModel& model, int x0, double t,
                      int x_t) {
  const SampleContext ctx = sample_context(schedule, model, x0, t, x_t);
  LossBreakdown out = decompose_row_kl(ctx.target, ctx.heads);
  return out;
}

LossBreakdown loss_cond_stable(const Schedule& schedule, const ReverseModel& model, int x0,
                               double t, int x_t) {
  const int S = schedule.num_states();
  const ExitJump heads = model.forward_clamped(std::vector<int>{x_t}, t).per_position.at(0);
  const std::vector<double> q = forward_kernel(schedule, t, x0);
  if (!(q[x_t] > 0.0))
    throw UnreachableStateError("loss_cond_stable: q_{t|0}(x_t|x0) = 0");
  const double into_xt = schedule.rate_scale(t) * schedule.reference()[x_t];  // R_t(j, x_t)

  LossBreakdown out;
  double lam_hat = 0.0;
  double total = heads.zero_rate ? 0.0 : heads.exit_rate;  // sum_j lam * r_j
  for (int j = 0; j < S; ++j) {
    if (j == x_t || into_xt == 0.0) continue;
    const double w = q[j] / q[x_t];
    const double target_rate = into_xt * w;
    lam_hat += target_rate;
    if (w > 0.0) {
      const double c = reconstruct_rate(heads, j);
      if (!(c > 0.0)) {
        out.offending_state = j;
        out.total = kInf;
        out.poisson_term = kInf;
        return out;
      }
      total -= target_rate * std::log(c / into_xt);
    }
    total += into_xt * k_term(w);
  }
  out.total = total;
  if (lam_hat == 0.0) {
    out.poisson_term = heads.zero_rate ? 0.0 : heads.exit_rate;
    return out;
  }
  out.poisson_term = poisson_kl(lam_hat, heads.exit_rate);
  out.direction_term = out.total - out.poisson_term;
  return out;
}

LossBreakdown loss_sample(Objective obj, const Schedule& schedule, const ReverseModel& model,
                          int x0, double t, int x_t) {
  switch (obj) {
    case Objective::kCondStable:
      return loss_cond_stable(schedule, model, x0, t, x_t);
    case Objective::kKl:
      return loss_kl(schedule, model, x0, t, x_t);
    case Objective::kConditional:
      return loss_conditional(schedule, model, x0, t, x_t);
  }
  throw std::logic_error("loss_sample: bad objective");
}

HeadGradient loss_head_gradient(Objective obj, const Schedule& schedule, int x0, double t, int x_t,
                                const ExitJump& heads) {
  const ReverseTarget target = conditional_reverse(schedule, t, x0, x_t);
  const double lam = heads.exit_rate;
  if (!(lam > 0.0)) throw std::domain_error("loss_head_gradient: model exit rate must be positive");
  HeadGradient g;
  g.d_exit_rate = 1.0 - target.exit_rate / lam;
  g.d_jump_dist.assign(heads.jump_dist.size(), 0.0);
  for (std::size_t j = 0; j < heads.jump_dist.size(); ++j) {
    if (static_cast<int>(j) == x_t) continue;
    const double r = heads.jump_dist[j];
    const double target_rate = target.per_pair[j];
    double d = 0.0;
    if (obj == Objective::kConditional) {
      d = (target_rate > 0.0 && r > 0.0) ? -target_rate / r : 0.0;
    } else {
      d = lam - ((target_rate > 0.0 && r > 0.0) ? target_rate / r : 0.0);
    }
    g.d_jump_dist[j] = d;
  }
  return g;
}

double mdlm_loss(const Schedule& masked_schedule, double t, int x0, int x_t,
                 const std::vector<double>& clean_prediction) {
  if (masked_schedule.kind() != ScheduleKind::kMasked)
    throw UnsupportedScheduleError("mdlm_loss needs a masked schedule");
  const int m = masked_schedule.mask_state();
  if (x0 == m) throw std::domain_error("mdlm_loss: clean token cannot be the mask");
  if (static_cast<int>(clean_prediction.size()) != masked_schedule.num_states() - 1)
    throw std::invalid_argument("mdlm_loss: prediction must cover the vocabulary");
  require_probability_vector(clean_prediction);
  if (x_t != m) return 0.0;
  const double p = clean_prediction[x0];
  if (!(p > 0.0)) return kInf;
  const double gamma = -masked_schedule.alpha_prime(t) / masked_schedule.beta(t);
  return gamma * (-std::log(p));
}

GapReport compute_gap(const Schedule& schedule, const std::vector<double>& p_data,
                      const ReverseModel& model, int quad_points) {
  if (quad_points < 8) throw std::invalid_argument("compute_gap: quad_points must be >= 8");
  const int S = schedule.num_states();
  require_probability_vector(p_data);

  GapReport report;
  composite_nodes(schedule.t_lo(), schedule.t_hi(), quad_points, 8, true, report.t_nodes,
                  report.t_weights);
  report.min_delta = kInf;

  std::vector<int> support;
  for (int x0 = 0; x0 < S; ++x0)
    if (p_data[x0] > 0.0) support.push_back(x0);

  for (std::size_t k = 0; k < report.t_nodes.size(); ++k) {
    const double t = report.t_nodes[k];
    const double wt = report.t_weights[k];
    const std::vector<double> q_marg = marginal_distribution(schedule, p_data, t);

    std::vector<ExitJump> heads(S);
    for (int i = 0; i < S; ++i)
      heads[i] = model.forward_clamped(std::vector<int>{i}, t).per_position.at(0);

    std::vector<double> delta(static_cast<std::size_t>(S) * S, 0.0);
    double node_cond = 0.0, node_marg = 0.0;

    for (int i = 0; i < S; ++i) {
      if (!(q_marg[i] > 0.0)) continue;
      const ReverseTarget marg = marginal_reverse(schedule, p_data, t, i);
      node_marg += q_marg[i] * decompose_row_kl(marg, heads[i]).total;

      // Jensen gaps: E[R log R] - E[R] log E[R] over the posterior of x0
      std::vector<double> e_rlogr(S, 0.0);
      for (int x0 : support) {
        const std::vector<double> q_cond = forward_kernel(schedule, t, x0);
        if (!(q_cond[i] > 0.0)) continue;
        const double w = p_data[x0] * q_cond[i];
        const ReverseTarget cond = conditional_reverse(schedule, t, x0, i);
        node_cond += w * decompose_row_kl(cond, heads[i]).total;
        const double post = w / q_marg[i];
        for (int j = 0; j < S; ++j) {
          if (j == i) continue;
          e_rlogr[j] += post * xlogx(cond.per_pair[j]);
        }
      }
      for (int j = 0; j < S; ++j) {
        if (j == i) continue;
        const double d = e_rlogr[j] - xlogx(marg.per_pair[j]);
        delta[static_cast<std::size_t>(i) * S + j] = d;
        report.min_delta = std::min(report.min_delta, d);
      }
    }
    report.per_pair_delta.push_back(std::move(delta));
    report.l_kl_value += wt * node_cond;
    report.marginal_kl_value += wt * node_marg;
  }
  report.c_gap = report.l_kl_value - report.marginal_kl_value;
  if (report.min_delta == kInf) report.min_delta = 0.0;
  return report;
}

std::vector<double> gap_objective_gradient(const Schedule& schedule,
                                           const std::vector<double>& p_data,
                                           const TwoHeadModel& model, int quad_points,
                                           GapSide side) {
  const int S = schedule.num_states();
  require_probability_vector(p_data);
  std::vector<double> nodes, weights;
  composite_nodes(schedule.t_lo(), schedule.t_hi(), quad_points, 8, true, nodes, weights);

  std::vector<double> grad(model.params().size(), 0.0);
  std::vector<int> support;
  for (int x0 = 0; x0 < S; ++x0)
    if (p_data[x0] > 0.0) support.push_back(x0);

  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double t = nodes[k];
    const double wt = weights[k];
    const std::vector<double> q_marg = marginal_distribution(schedule, p_data, t);
    for (int i = 0; i < S; ++i) {
      if (!(q_marg[i] > 0.0)) continue;
      const ExitJump heads = model.forward_clamped(std::vector<int>{i}, t).per_position.at(0);
      const double lam = heads.exit_rate;
      HeadGradient up;
      up.d_jump_dist.assign(S, 0.0);
      if (side == GapSide::kMarginal) {
        const ReverseTarget target = marginal_reverse(schedule, p_data, t, i);
        const double w = wt * q_marg[i];
        up.d_exit_rate = w * (1.0 - target.exit_rate / lam);
        for (int j = 0; j < S; ++j) {
          if (j == i) continue;
          const double r = heads.jump_dist[j];
          up.d_jump_dist[j] = w * (lam - (r > 0.0 ? target.per_pair[j] / r : 0.0));
        }
      } else {
        for (int x0 : support) {
          const std::vector<double> q_cond = forward_kernel(schedule, t, x0);
          if (!(q_cond[i] > 0.0)) continue;
          const double w = wt * p_data[x0] * q_cond[i];
          const ReverseTarget target = conditional_reverse(schedule, t, x0, i);
          up.d_exit_rate += w * (1.0 - target.exit_rate / lam);
          for (int j = 0; j < S; ++j) {
            if (j == i) continue;
            const double r = heads.jump_dist[j];
            up.d_jump_dist[j] += w * (lam - (r > 0.0 ? target.per_pair[j] / r : 0.0));
          }
        }
      }
      const std::vector<double> g =
          model.backward(std::vector<int>{i}, t, std::vector<HeadGradient>{up});
      kernels::axpy(grad.data(), 1.0, g.data(), g.size());
    }
  }
  return grad;
}

double mc_marginal_loss(const Schedule& schedule, const std::vector<double>& p_data,
                        const ReverseModel& model, long n_samples, Rng& rng) {
  const double lo = schedule.t_lo(), hi = schedule.t_hi();
  std::vector<double> samples;
  samples.reserve(n_samples);
  for (long k = 0; k < n_samples; ++k) {
    const double t = rng.uniform(lo, hi);
    const std::vector<double> q = marginal_distribution(schedule, p_data, t);
    const int x_t = rng.categorical(q);
    const ReverseTarget target = marginal_reverse(schedule, p_data, t, x_t);
    const ExitJump heads = model.forward_clamped(std::vector<int>{x_t}, t).per_position.at(0);
    double term = poisson_kl(target.exit_rate, heads.exit_rate);
    for (std::size_t j = 0; j < target.per_pair.size(); ++j) {
      if (target.per_pair[j] <= 0.0) continue;
      const double r = heads.jump_dist[j];
      if (!(r > 0.0)) return kInf;
      term -= target.per_pair[j] * std::log(r);
    }
    samples.push_back(term);
  }
  return (hi - lo) * kernels::pairwise_sum(samples) / static_cast<double>(n_samples);
}

double conditional_elbo(const Schedule& schedule, const ReverseModel& model, int x0,
                        double t_hi) {
  const int S = schedule.num_states();
  schedule.require_time_in_domain(t_hi);
  const std::vector<double>& prior = schedule.reference();

  const std::vector<double> q_end = forward_kernel(schedule, t_hi, x0);
  double prior_term = 0.0;
  for (int i = 0; i < S; ++i) {
    if (q_end[i] == 0.0) continue;
    if (!(prior[i] > 0.0)) return kInf;
    prior_term -= q_end[i] * std::log(prior[i]);
  }

  const double integral = integrate_adaptive(
      [&](double t) {
        const double scale = schedule.rate_scale(t);
        const std::vector<double> q = forward_kernel(schedule, t, x0);
        std::vector<ExitJump> heads(S);
        for (int i = 0; i < S; ++i)
          heads[i] = model.forward_clamped(std::vector<int>{i}, t).per_position.at(0);
        double acc = 0.0;
        for (int i = 0; i < S; ++i) {
          if (!(q[i] > 0.0)) continue;
          double row = 0.0;
          for (int j = 0; j < S; ++j) {
            if (j == i) continue;
            const double fwd = scale * schedule.reference()[j];  // R_t(i, j)
            const double rev_ji = reconstruct_rate(heads[j], i);
            const double rev_ij = reconstruct_rate(heads[i], j);
            if (fwd > 0.0) {
              if (!(rev_ji > 0.0)) return kInf;
              row += fwd * std::log(fwd / rev_ji) - fwd;
            }
            row += rev_ij;
          }
          acc += q[i] * row;
        }
        return acc;
      },
      0.0, t_hi, 1e-9);
  return prior_term + integral;
}

}  // namespace nctmc
