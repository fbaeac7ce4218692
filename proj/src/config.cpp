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

#include "nctmc/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nctmc/objectives.hpp"

namespace nctmc {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::ostringstream os;
  char buf[40];
  for (std::size_t k = 0; k < v.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", v[k]);
    if (k) os << ',';
    os << buf;
  }
  return os.str();
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream text;
  text << is.rdbuf();
  return parse(text.str());
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "schedule_kind") cfg.schedule_kind = value;
    else if (key == "num_states") cfg.num_states = std::stoi(value);
    else if (key == "horizon") cfg.horizon = std::stod(value);
    else if (key == "eps_t") cfg.eps_t = std::stod(value);
    else if (key == "alpha_power") cfg.alpha_power = std::stod(value);
    else if (key == "model_variant") cfg.model_variant = value;
    else if (key == "time_buckets") cfg.time_buckets = std::stoi(value);
    else if (key == "hidden_width") cfg.hidden_width = std::stoi(value);
    else if (key == "seq_len") cfg.seq_len = std::stoi(value);
    else if (key == "objective") cfg.objective = value;
    else if (key == "lr") cfg.lr = std::stod(value);
    else if (key == "momentum") cfg.momentum = std::stod(value);
    else if (key == "steps") cfg.steps = std::stol(value);
    else if (key == "batch") cfg.batch = std::stoi(value);
    else if (key == "log_interval") cfg.log_interval = std::stol(value);
    else if (key == "sampler_steps") cfg.sampler_steps = std::stoi(value);
    else if (key == "scheme") cfg.scheme = value;
    else if (key == "n_samples") cfg.n_samples = std::stol(value);
    else if (key == "sc_temperature") cfg.sc_temperature = std::stod(value);
    else if (key == "sc_max_updates") cfg.sc_max_updates = std::stoi(value);
    else if (key == "sc_noise_level") cfg.sc_noise_level = std::stod(value);
    else if (key == "dataset") cfg.dataset = value;
    else if (key == "data_probs") cfg.data_probs = parse_list(value);
    else if (key == "data_init") cfg.data_init = parse_list(value);
    else if (key == "data_transition") cfg.data_transition = parse_list(value);
    else if (key == "n_paths") cfg.n_paths = std::stol(value);
    else if (key == "sim_t_end") cfg.sim_t_end = std::stod(value);
    else if (key == "marginal_grid_points") cfg.marginal_grid_points = std::stoi(value);
    else if (key == "seed") {
      cfg.seed = std::stoull(value);
      cfg.seed_set = true;
    } else {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" + key +
                               "'");
    }
  }
  return cfg;
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  char buf[64];
  auto put_d = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s = %.17g\n", key, v);
    os << buf;
  };
  os << "schedule_kind = " << schedule_kind << '\n';
  os << "num_states = " << num_states << '\n';
  put_d("horizon", horizon);
  put_d("eps_t", eps_t);
  put_d("alpha_power", alpha_power);
  os << "model_variant = " << model_variant << '\n';
  os << "time_buckets = " << time_buckets << '\n';
  os << "hidden_width = " << hidden_width << '\n';
  os << "seq_len = " << seq_len << '\n';
  os << "objective = " << objective << '\n';
  put_d("lr", lr);
  put_d("momentum", momentum);
  os << "steps = " << steps << '\n';
  os << "batch = " << batch << '\n';
  os << "log_interval = " << log_interval << '\n';
  os << "sampler_steps = " << sampler_steps << '\n';
  os << "scheme = " << scheme << '\n';
  os << "n_samples = " << n_samples << '\n';
  put_d("sc_temperature", sc_temperature);
  os << "sc_max_updates = " << sc_max_updates << '\n';
  put_d("sc_noise_level", sc_noise_level);
  os << "dataset = " << dataset << '\n';
  if (!data_probs.empty()) os << "data_probs = " << format_list(data_probs) << '\n';
  if (!data_init.empty()) os << "data_init = " << format_list(data_init) << '\n';
  if (!data_transition.empty()) os << "data_transition = " << format_list(data_transition) << '\n';
  os << "n_paths = " << n_paths << '\n';
  put_d("sim_t_end", sim_t_end);
  os << "marginal_grid_points = " << marginal_grid_points << '\n';
  if (seed_set) os << "seed = " << seed << '\n';
  return os.str();
}

void ExperimentConfig::validate() const {
  if (!seed_set) throw std::runtime_error("config: seed is required");
  if (schedule_kind != "uniform" && schedule_kind != "masked")
    throw std::runtime_error("config: schedule_kind must be uniform or masked");
  if (model_variant != "tabular" && model_variant != "mlp")
    throw std::runtime_error("config: model_variant must be tabular or mlp");
  objective_from_string(objective);  // throws on bad value
  scheme_from_string(scheme);
  if (dataset != "categorical_iid" && dataset != "markov_sequences" && dataset != "grid_image")
    throw std::runtime_error("config: unknown dataset kind " + dataset);
  if (seq_len < 1) throw std::runtime_error("config: seq_len must be >= 1");
  if (batch < 1) throw std::runtime_error("config: batch must be >= 1");
}

Schedule ExperimentConfig::make_schedule() const {
  if (schedule_kind == "masked")
    return Schedule::masked(num_states, horizon, alpha_power, eps_t);
  return Schedule::uniform(num_states, horizon, alpha_power, eps_t);
}

ToyDataset ExperimentConfig::make_dataset() const {
  if (dataset == "categorical_iid") return ToyDataset::categorical_iid(data_probs, seq_len);
  if (dataset == "markov_sequences") return ToyDataset::markov(data_init, data_transition, seq_len);
  return ToyDataset::grid_image();
}

TwoHeadModel ExperimentConfig::make_model(const Schedule& schedule) const {
  const std::uint64_t model_seed = Rng::split(seed, 0);
  if (model_variant == "mlp")
    return TwoHeadModel::mlp(schedule.num_states(), seq_len, hidden_width, schedule.t_lo(),
                             schedule.t_hi(), model_seed);
  return TwoHeadModel::tabular(schedule.num_states(), seq_len, time_buckets, schedule.t_lo(),
                               schedule.t_hi(), model_seed);
}

}  // namespace nctmc
