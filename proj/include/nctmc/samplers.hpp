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

#ifndef NCTMC_SAMPLERS_HPP
#define NCTMC_SAMPLERS_HPP

#include <cstdint>
#include <vector>

#include "nctmc/ctmc.hpp"
#include "nctmc/model.hpp"
#include "nctmc/rng.hpp"

namespace nctmc {

enum class Scheme { kTauLeaping, kEuler, kExact };

Scheme scheme_from_string(const std::string& name);
std::string scheme_name(Scheme s);

struct SamplerConfig {
  int steps = 64;  // N; tau = T/N
  Scheme scheme = Scheme::kTauLeaping;
  std::uint64_t seed = 0;
};

struct SelfCorrectConfig {
  double temperature = 0.1;  // tau_sc
  int max_updates = 1;       // K
  double noise_level = 0.3;  // t at which corrections are evaluated
};

struct SampleResult {
  std::vector<int> tokens;
  long euler_overflow_events = 0;  // steps whose off-diagonal mass exceeded 1
};

/// Per-position holding-time leap: one model call per step, simultaneous
/// per-position updates; a position jumps iff its Exp(exit rate) draw falls
/// inside the step. Zero-rate sentinels never jump.
SampleResult sample_tau_leaping(const ReverseModel& model, const Schedule& schedule,
                                const SamplerConfig& config, Rng& rng);

/// One-step categorical transitions with p_j = exit*r_j*tau; if the
/// off-diagonal mass exceeds 1 it is rescaled to sum to 1 and the overflow
/// counter increments.
SampleResult sample_euler(const ReverseModel& model, const Schedule& schedule,
                          const SamplerConfig& config, Rng& rng);

/// Statistically exact reverse simulation on [t_lo, t_hi] via first-reaction
/// integrated-hazard inversion across positions; the zero-discretization
/// reference for the two discrete schemes.
SampleResult sample_exact(const ReverseModel& model, const Schedule& schedule, Rng& rng);

SampleResult sample(const ReverseModel& model, const Schedule& schedule,
                    const SamplerConfig& config, Rng& rng);

/// Model-implied noised distribution and the clipped clean-token recovery;
/// uniform reference only.
struct RecoveredClean {
  std::vector<double> q_tilde;
  std::vector<double> p0_hat;
};

RecoveredClean recover_clean(const ExitJump& model_out, const Schedule& schedule, double t, int i);

/// Inverse of recover_clean's head relations: heads whose recovery reproduces
/// q_tilde exactly (test oracle for the round trip).
ExitJump heads_from_qtilde(const std::vector<double>& q_tilde, const Schedule& schedule, double t,
                           int i);

struct SelfCorrectResult {
  std::vector<int> tokens;
  int edits = 0;
  int degenerate_positions = 0;  // excluded from the disagreement set
};

/// Algorithm: per round, sample a temperature-sharpened clean-token proposal
/// per position from the recovered distribution; stop when every proposal
/// agrees, otherwise rewrite the highest-confidence disagreeing position.
/// At most max_updates single-position edits.
SelfCorrectResult self_correct(const ReverseModel& model, const Schedule& schedule,
                               std::vector<int> tokens, double t, const SelfCorrectConfig& config,
                               Rng& rng);

}  // namespace nctmc

#endif  // NCTMC_SAMPLERS_HPP
