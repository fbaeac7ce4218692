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

#include "nctmc/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "nctmc/quadrature.hpp"

namespace nctmc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int Path::state_at(double t) const {
  int s = initial_state;
  for (const auto& [tk, sk] : jumps) {
    if (tk > t) break;
    s = sk;
  }
  return s;
}

void Path::validate() const {
  double prev_t = 0.0;
  int prev_s = initial_state;
  for (const auto& [tk, sk] : jumps) {
    if (!(tk > prev_t && tk < horizon))
      throw std::invalid_argument("Path: jump times must be strictly increasing in (0, horizon)");
    if (sk == prev_s) throw std::invalid_argument("Path: self-jump");
    prev_t = tk;
    prev_s = sk;
  }
}

std::string Path::serialize() const {
  std::ostringstream os;
  char buf[40];
  os << initial_state;
  std::snprintf(buf, sizeof(buf), " %.12g", horizon);
  os << buf << ' ' << jumps.size();
  for (const auto& [tk, sk] : jumps) {
    std::snprintf(buf, sizeof(buf), " %.12g", tk);
    os << buf << ' ' << sk;
  }
  return os.str();
}

Path Path::deserialize(const std::string& line) {
  std::istringstream is(line);
  Path p;
  std::size_t n = 0;
  if (!(is >> p.initial_state >> p.horizon >> n)) throw std::runtime_error("Path: bad record");
  p.jumps.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(is >> p.jumps[k].first >> p.jumps[k].second))
      throw std::runtime_error("Path: truncated record");
  }
  return p;
}

double log_path_density(const RateMatrix& rate, const Path& path, int* bad_jump) {
  if (bad_jump) *bad_jump = -1;
  double log_jumps = 0.0;
  int prev = path.initial_state;
  for (std::size_t k = 0; k < path.jumps.size(); ++k) {
    const auto& [tk, sk] = path.jumps[k];
    const double r = rate.off_diag(tk, prev, sk);
    if (!(r > 0.0)) {
      if (bad_jump) *bad_jump = static_cast<int>(k);
      return -kInf;
    }
    log_jumps += std::log(r);
    prev = sk;
  }
  // survival integral, one adaptive quadrature per holding interval
  double survival = 0.0;
  double t0 = 0.0;
  int s = path.initial_state;
  auto add_interval = [&](double a, double b, int state) {
    if (b > a)
      survival += integrate_adaptive([&](double t) { return rate.exit_rate(t, state); }, a, b);
  };
  for (const auto& [tk, sk] : path.jumps) {
    add_interval(t0, tk, s);
    t0 = tk;
    s = sk;
  }
  add_interval(t0, path.horizon, s);
  return log_jumps - survival;
}

double log_rn_segment(const RateMatrix& fwd_rate, const ReverseModel& model, const Path& path,
                      double a, double b) {
  double log_ratio = 0.0;
  int prev = path.initial_state;
  for (const auto& [tk, sk] : path.jumps) {
    if (tk > a && tk <= b) {
      const double fwd = fwd_rate.off_diag(tk, prev, sk);
      const ExitJump heads = model.heads1(sk, tk);
      const double rev = reconstruct_rate(heads, prev);
      if (!(rev > 0.0) || !(fwd > 0.0)) return rev > 0.0 ? kInf : -kInf;
      log_ratio += std::log(rev) - std::log(fwd);
    }
    prev = sk;
  }
  double survival_diff = 0.0;
  auto add_interval = [&](double lo, double hi, int state) {
    const double lo_c = std::max(lo, a);
    const double hi_c = std::min(hi, b);
    if (hi_c > lo_c) {
      survival_diff += integrate_adaptive(
          [&](double t) {
            return fwd_rate.exit_rate(t, state) - model.heads1(state, t).exit_rate;
          },
          lo_c, hi_c);
    }
  };
  double t0 = 0.0;
  int s = path.initial_state;
  for (const auto& [tk, sk] : path.jumps) {
    add_interval(t0, tk, s);
    t0 = tk;
    s = sk;
  }
  add_interval(t0, path.horizon, s);
  return log_ratio + survival_diff;
}

double log_rn_derivative(const RateMatrix& fwd_rate, const ReverseModel& model,
                         const std::vector<double>& prior, const Path& path, int* bad_jump) {
  if (bad_jump) *bad_jump = -1;
  const int xn = path.final_state();
  if (!(prior.at(xn) > 0.0)) {
    // Lemma's prior term is undefined on zero-mass end states; uniform and
    // one-hot priors used here never reach this, so raise a diagnostic.
    throw std::domain_error("log_rn_derivative: prior has zero mass at the path end state");
  }
  const double seg = log_rn_segment(fwd_rate, model, path, 0.0, path.horizon);
  return std::log(prior[xn]) + seg;
}

RateProvider exit_jump_provider(const RateMatrix& rate) {
  RateProvider p;
  p.exit_rate = [rate](double t, int i) { return rate.exit_rate(t, i); };
  p.exit_jump = [rate](double t, int i) { return decompose_rate(rate, t, i); };
  return p;
}

RateProvider model_rate_provider(const ReverseModel& model) {
  RateProvider p;
  p.exit_rate = [&model](double t, int i) { return model.heads1(i, t).exit_rate; };
  p.exit_jump = [&model](double t, int i) { return model.heads1(i, t); };
  return p;
}

namespace {

// Hazard accumulated over [a, b] for a fixed state; adaptive to rel 1e-10.
double hazard_integral(const RateProvider& rates, int state, double a, double b) {
  return integrate_adaptive(
      [&](double t) {
        const double lam = rates.exit_rate(t, state);
        if (!std::isfinite(lam)) throw SimulationError("non-finite exit rate inside interval");
        return lam;
      },
      a, b);
}

}  // namespace

Path gillespie_sample(const RateProvider& rates, int x_init, double t_start, double t_end,
                      Rng& rng) {
  if (!(t_start < t_end)) throw std::invalid_argument("gillespie_sample: t_start >= t_end");
  Path path;
  path.initial_state = x_init;
  path.horizon = t_end;
  double t_cur = t_start;
  int state = x_init;
  const int kSegments = 64;
  while (true) {
    const double target = rng.exp1();
    // march across macro segments until the cumulative hazard brackets target
    double acc = 0.0;
    const double seg_w = (t_end - t_cur) / kSegments;
    double seg_lo = t_cur;
    double jump_time = -1.0;
    for (int seg = 0; seg < kSegments; ++seg) {
      const double seg_hi = (seg == kSegments - 1) ? t_end : seg_lo + seg_w;
      const double inc = hazard_integral(rates, state, seg_lo, seg_hi);
      if (acc + inc >= target) {
        // bisect inside [seg_lo, seg_hi] to time tolerance 1e-9
        double lo = seg_lo, hi = seg_hi;
        while (hi - lo > 1e-9) {
          const double mid = 0.5 * (lo + hi);
          const double part = hazard_integral(rates, state, seg_lo, mid);
          if (acc + part >= target)
            hi = mid;
          else
            lo = mid;
        }
        jump_time = 0.5 * (lo + hi);
        break;
      }
      acc += inc;
      seg_lo = seg_hi;
    }
    if (jump_time < 0.0) break;  // survived to t_end
    const ExitJump ej = rates.exit_jump(jump_time, state);
    if (ej.zero_rate || !(ej.exit_rate > 0.0))
      throw SimulationError("gillespie_sample: zero exit rate at the resolved jump time");
    const int dest = rng.categorical(ej.jump_dist);
    path.jumps.emplace_back(jump_time, dest);
    state = dest;
    t_cur = jump_time;
    if (t_cur >= t_end) break;
  }
  return path;
}

CampbellMeckeResult campbell_mecke_check(const RateMatrix& rate, const Schedule& schedule, int x0,
                                         const std::function<double(double, int, int)>& f,
                                         double t_end, long n_paths, Rng& rng) {
  CampbellMeckeResult result;
  result.n_paths = n_paths;
  const RateProvider provider = exit_jump_provider(rate);
  double sum = 0.0, sum_sq = 0.0;
  for (long k = 0; k < n_paths; ++k) {
    const Path path = gillespie_sample(provider, x0, 0.0, t_end, rng);
    double acc = 0.0;
    int prev = path.initial_state;
    for (const auto& [tk, sk] : path.jumps) {
      acc += f(tk, prev, sk);
      prev = sk;
    }
    sum += acc;
    sum_sq += acc * acc;
  }
  result.mc_estimate = sum / n_paths;
  const double var = std::max(0.0, sum_sq / n_paths - result.mc_estimate * result.mc_estimate);
  result.std_error = std::sqrt(var / n_paths);

  const int S = schedule.num_states();
  result.analytic = integrate_adaptive(
      [&](double t) {
        const std::vector<double> q = forward_kernel(schedule, t, x0);
        double acc = 0.0;
        for (int i = 0; i < S; ++i) {
          if (q[i] == 0.0) continue;
          for (int j = 0; j < S; ++j) {
            if (j == i) continue;
            const double r = rate.off_diag(t, i, j);
            if (r != 0.0) acc += q[i] * r * f(t, i, j);
          }
        }
        return acc;
      },
      0.0, t_end, 1e-9);
  return result;
}

}  // namespace nctmc
