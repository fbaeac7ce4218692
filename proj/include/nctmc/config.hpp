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

#ifndef NCTMC_CONFIG_HPP
#define NCTMC_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nctmc/ctmc.hpp"
#include "nctmc/dataset.hpp"
#include "nctmc/model.hpp"
#include "nctmc/samplers.hpp"

namespace nctmc {

// Flat `key = value` experiment configuration ('#' starts a comment). A seed
// is mandatory: there are no entropy-source defaults anywhere.
struct ExperimentConfig {
  // schedule
  std::string schedule_kind = "uniform";  // uniform | masked
  int num_states = 3;                     // masked: vocabulary size excluding the mask
  double horizon = 1.0;
  double eps_t = -1.0;  // default 1e-3 * horizon
  double alpha_power = 1.0;

  // model
  std::string model_variant = "tabular";  // tabular | mlp
  int time_buckets = 64;
  int hidden_width = 64;
  int seq_len = 1;

  // objective + optimizer
  std::string objective = "cond_stable";  // cond_stable | kl | conditional
  double lr = 1e-2;
  double momentum = 0.9;
  long steps = 1000;
  int batch = 64;
  long log_interval = 100;

  // sampler
  int sampler_steps = 64;
  std::string scheme = "tau";  // tau | euler | exact
  long n_samples = 100;

  // self-correction
  double sc_temperature = 0.1;
  int sc_max_updates = 4;
  double sc_noise_level = 0.3;

  // dataset
  std::string dataset = "categorical_iid";  // categorical_iid | markov_sequences | grid_image
  std::vector<double> data_probs = {0.7, 0.3, 0.0};
  std::vector<double> data_init;
  std::vector<double> data_transition;

  // simulate / export
  long n_paths = 1000;
  double sim_t_end = -1.0;  // default t_hi
  int marginal_grid_points = 9;

  std::uint64_t seed = 0;
  bool seed_set = false;

  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse(const std::string& text);
  std::string to_text() const;

  void validate() const;

  Schedule make_schedule() const;
  ToyDataset make_dataset() const;
  TwoHeadModel make_model(const Schedule& schedule) const;
};

}  // namespace nctmc

#endif  // NCTMC_CONFIG_HPP
