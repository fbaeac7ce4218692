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

#include "nctmc/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nctmc/quadrature.hpp"

namespace nctmc {

Scheme scheme_from_string(const std::string& name) {
  if (name == "tau") return Scheme::kTauLeaping;
  if (name == "euler") return Scheme::kEuler;
  if (name == "exact") return Scheme::kExact;
  throw std::invalid_argument("unknown scheme: " + name);
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kTauLeaping:
      return "tau";
    case Scheme::kEuler:
      return "euler";
    case Scheme::kExact:
      return "exact";
  }
  return "?";
}

namespace {

std::vector<int> initial_noise(const Schedule& schedule, int seq_len, Rng& rng) {
  std::vector<int> x(seq_len);
  if (schedule.kind() == ScheduleKind::kMasked) {
    std::fill(x.begin(), x.end(), schedule.mask_state());
  } else {
    for (int& v : x) v = rng.categorical(schedule.reference());
  }
  return x;
}

}  // namespace

SampleResult sample_tau_leaping(const ReverseModel& model, const Schedule& schedule,
                                const SamplerConfig& config, Rng& rng) {
  if (config.steps < 1) throw std::invalid_argument("sample_tau_leaping: steps must be >= 1");
  const int L = model.seq_len();
  const double tau = schedule.horizon() / config.steps;
  SampleResult result;
  result.tokens = initial_noise(schedule, L, rng);
  for (int n = config.steps; n >= 1; --n) {
    const double t = n * tau;
    const HeadOutput heads = model.forward_clamped(result.tokens, t);
    std::vector<int> next = result.tokens;
    for (int l = 0; l < L; ++l) {
      const ExitJump& ej = heads.per_position[l];
      const double holding = rng.exponential(ej.zero_rate ? 0.0 : ej.exit_rate);
      if (holding < tau) next[l] = rng.categorical(ej.jump_dist);
    }
    result.tokens = std::move(next);
  }
  return result;
}

SampleResult sample_euler(const ReverseModel& model, const Schedule& schedule,
                          const SamplerConfig& config, Rng& rng) {
  if (config.steps < 1) throw std::invalid_argument("sample_euler: steps must be >= 1");
  const int L = model.seq_len();
  const int S = model.num_states();
  const double tau = schedule.horizon() / config.steps;
  SampleResult result;
  result.tokens = initial_noise(schedule, L, rng);
  std::vector<double> p(S);
  for (int n = config.steps; n >= 1; --n) {
    const double t = n * tau;
    const HeadOutput heads = model.forward_clamped(result.tokens, t);
    for (int l = 0; l < L; ++l) {
      const ExitJump& ej = heads.per_position[l];
      const int cur = result.tokens[l];
      double off_mass = 0.0;
      for (int j = 0; j < S; ++j) {
        p[j] = (j == cur || ej.zero_rate) ? 0.0 : ej.exit_rate * ej.jump_dist[j] * tau;
        off_mass += p[j];
      }
      if (off_mass > 1.0) {
        for (int j = 0; j < S; ++j) p[j] /= off_mass;
        p[cur] = 0.0;
        ++result.euler_overflow_events;
      } else {
        p[cur] = 1.0 - off_mass;
      }
      result.tokens[l] = rng.categorical(p);
    }
  }
  return result;
}

SampleResult sample_exact(const ReverseModel& model, const Schedule& schedule, Rng& rng) {
  const int L = model.seq_len();
  const double s_max = schedule.t_hi() - schedule.t_lo();
  SampleResult result;
  result.tokens = initial_noise(schedule, L, rng);

  // First-reaction in the reversed clock s = t_hi - t: per position, the next
  // jump solves the integrated-hazard equation; all positions redraw after
  // any jump since the model conditions on the whole sequence.
  const int kSegments = 64;
  double s_cur = 0.0;
  while (s_cur < s_max) {
    std::vector<double> targets(L);
    for (int l = 0; l < L; ++l) targets[l] = rng.exp1();
    std::vector<double> acc(L, 0.0);
    const double seg_w = (s_max - s_cur) / kSegments;
    double seg_lo = s_cur;
    int jump_pos = -1;
    double jump_s = -1.0;
    for (int seg = 0; seg < kSegments && jump_pos < 0; ++seg) {
      const double seg_hi = (seg == kSegments - 1) ? s_max : seg_lo + seg_w;
      // shared hazard increments for every position over this segment
      std::vector<double> inc(L, 0.0);
      {
        const GaussLegendreRule& rule = GaussLegendreRule::get(7);
        const double mid = 0.5 * (seg_lo + seg_hi);
        const double hw = 0.5 * (seg_hi - seg_lo);
        for (int k = 0; k < 7; ++k) {
          const double s = mid + hw * rule.nodes[k];
          const HeadOutput heads = model.forward_clamped(result.tokens, schedule.t_hi() - s);
          for (int l = 0; l < L; ++l) {
            const ExitJump& ej = heads.per_position[l];
            inc[l] += hw * rule.weights[k] * (ej.zero_rate ? 0.0 : ej.exit_rate);
          }
        }
      }
      // earliest crossing wins; bisection to 1e-9 in the reversed clock
      for (int l = 0; l < L; ++l) {
        if (acc[l] + inc[l] < targets[l]) continue;
        double lo = seg_lo, hi = seg_hi;
        while (hi - lo > 1e-9) {
          const double mid = 0.5 * (lo + hi);
          const double part = integrate_adaptive(
              [&](double s) {
                const ExitJump ej =
                    model.forward_clamped(result.tokens, schedule.t_hi() - s).per_position[l];
                return ej.zero_rate ? 0.0 : ej.exit_rate;
              },
              seg_lo, mid);
          if (acc[l] + part >= targets[l])
            hi = mid;
          else
            lo = mid;
        }
        const double cand = 0.5 * (lo + hi);
        if (jump_pos < 0 || cand < jump_s) {
          jump_pos = l;
          jump_s = cand;
        }
      }
      if (jump_pos < 0) {
        for (int l = 0; l < L; ++l) acc[l] += inc[l];
        seg_lo = seg_hi;
      }
    }
    if (jump_pos < 0) break;  // all positions survived to s_max
    const double t_jump = schedule.t_hi() - jump_s;
    const ExitJump heads = model.forward_clamped(result.tokens, t_jump).per_position[jump_pos];
    if (heads.zero_rate || !(heads.exit_rate > 0.0))
      throw SimulationError("sample_exact: zero exit rate at the resolved jump time");
    result.tokens[jump_pos] = rng.categorical(heads.jump_dist);
    s_cur = jump_s;
  }
  return result;
}

SampleResult sample(const ReverseModel& model, const Schedule& schedule,
                    const SamplerConfig& config, Rng& rng) {
  switch (config.scheme) {
    case Scheme::kTauLeaping:
      return sample_tau_leaping(model, schedule, config, rng);
    case Scheme::kEuler:
      return sample_euler(model, schedule, config, rng);
    case Scheme::kExact:
      return sample_exact(model, schedule, rng);
  }
  throw std::logic_error("sample: bad scheme");
}

RecoveredClean recover_clean(const ExitJump& model_out, const Schedule& schedule, double t,
                             int i) {
  const int S = schedule.num_states();
  if (schedule.kind() != ScheduleKind::kUniform)
    throw UnsupportedScheduleError("recover_clean: uniform schedule required");
  for (double v : schedule.reference()) {
    if (std::abs(v - 1.0 / S) > 1e-12)
      throw UnsupportedScheduleError("recover_clean: uniform reference required");
  }
  const double a = schedule.alpha(t);
  if (!(a > 0.0)) throw SingularityError("recover_clean: alpha_t = 0");
  const double b = schedule.beta(t);

  RecoveredClean rec;
  rec.q_tilde.assign(S, 0.0);
  const double lam = model_out.zero_rate ? 0.0 : model_out.exit_rate;
  const double qi = 1.0 / (1.0 + S * a * lam);
  rec.q_tilde[i] = qi;
  for (int j = 0; j < S; ++j) {
    if (j == i) continue;
    rec.q_tilde[j] = (1.0 - qi) * (model_out.zero_rate ? 0.0 : model_out.jump_dist[j]);
  }

  rec.p0_hat.assign(S, 0.0);
  double total = 0.0;
  for (int j = 0; j < S; ++j) {
    const double v = (rec.q_tilde[j] - b / S) / a;
    rec.p0_hat[j] = std::max(v, 0.0);
    total += rec.p0_hat[j];
  }
  if (!(total > 0.0))
    throw DegenerateRecoveryError("recover_clean: clipped clean-token vector is all zero");
  for (double& v : rec.p0_hat) v /= total;
  return rec;
}

ExitJump heads_from_qtilde(const std::vector<double>& q_tilde, const Schedule& schedule, double t,
                           int i) {
  const int S = schedule.num_states();
  require_probability_vector(q_tilde);
  const double a = schedule.alpha(t);
  if (!(a > 0.0)) throw SingularityError("heads_from_qtilde: alpha_t = 0");
  ExitJump ej;
  ej.jump_dist.assign(S, 0.0);
  const double qi = q_tilde[i];
  if (!(qi > 0.0)) throw std::domain_error("heads_from_qtilde: zero mass at the current state");
  ej.exit_rate = (1.0 / (S * a)) * (1.0 - qi) / qi;
  if (ej.exit_rate == 0.0) {
    ej.zero_rate = true;
    return ej;
  }
  for (int j = 0; j < S; ++j) {
    if (j == i) continue;
    ej.jump_dist[j] = q_tilde[j] / (1.0 - qi);
  }
  return ej;
}

namespace {

// Temperature sharpening in log space: p^{1/tau} normalized.
std::vector<double> temper(const std::vector<double>& p, double temperature) {
  std::vector<double> w(p.size(), 0.0);
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : p)
    if (v > 0.0) mx = std::max(mx, std::log(v));
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] > 0.0) w[j] = std::exp((std::log(p[j]) - mx) / temperature);
  }
  return w;
}

}  // namespace

SelfCorrectResult self_correct(const ReverseModel& model, const Schedule& schedule,
                               std::vector<int> tokens, double t, const SelfCorrectConfig& config,
                               Rng& rng) {
  if (!(config.temperature > 0.0))
    throw std::invalid_argument("self_correct: temperature must be positive");
  if (config.max_updates < 1)
    throw std::invalid_argument("self_correct: max_updates must be >= 1");
  if (schedule.kind() != ScheduleKind::kUniform)
    throw UnsupportedScheduleError("self_correct: uniform schedule required");
  const int L = static_cast<int>(tokens.size());
  SelfCorrectResult result;
  for (int round = 0; round < config.max_updates; ++round) {
    const HeadOutput heads = model.forward_clamped(tokens, t);
    std::vector<int> proposal(L, -1);
    std::vector<double> confidence(L, 0.0);
    std::vector<int> disagree;
    for (int l = 0; l < L; ++l) {
      RecoveredClean rec;
      try {
        rec = recover_clean(heads.per_position[l], schedule, t, tokens[l]);
      } catch (const DegenerateRecoveryError&) {
        ++result.degenerate_positions;
        continue;
      }
      const std::vector<double> w = temper(rec.p0_hat, config.temperature);
      const int cand = rng.categorical(w);
      proposal[l] = cand;
      confidence[l] = rec.p0_hat[cand];
      if (cand != tokens[l]) disagree.push_back(l);
    }
    if (disagree.empty()) break;
    int best = disagree[0];
    for (int l : disagree) {
      if (confidence[l] > confidence[best]) best = l;
    }
    tokens[best] = proposal[best];
    ++result.edits;
  }
  result.tokens = std::move(tokens);
  return result;
}

}  // namespace nctmc
