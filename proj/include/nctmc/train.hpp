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

#ifndef NCTMC_TRAIN_HPP
#define NCTMC_TRAIN_HPP

#include <iosfwd>
#include <string>

#include "nctmc/config.hpp"
#include "nctmc/model.hpp"

namespace nctmc {

struct TrainResult {
  TwoHeadModel model;
  bool aborted = false;
  std::string abort_reason;
  double first_window_loss = 0.0;  // mean loss over the first 10% of steps
  double last_window_loss = 0.0;   // mean loss over the last 10% of steps
};

/// Conditional-target training loop: per sample draw x0 ~ data,
/// t ~ U(eps, T-eps), x_t ~ q_{t|0}; evaluate the configured loss per
/// position; SGD-with-momentum update per batch. Metrics records go to
/// `metrics` as JSON lines {"step","loss","poisson","direction"} every
/// log_interval steps; wall-clock timing, which would break byte-identical
/// reruns, goes to `timing_log` when given.
TrainResult train(const ExperimentConfig& config, std::ostream& metrics,
                  std::ostream* timing_log = nullptr);

/// Final-row summary CSV (step count, final losses) for quick inspection.
std::string train_summary_csv(const ExperimentConfig& config, const TrainResult& result);

}  // namespace nctmc

#endif  // NCTMC_TRAIN_HPP
