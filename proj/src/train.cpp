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

#include "nctmc/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "nctmc/kernels.hpp"
#include "nctmc/objectives.hpp"
#include "nctmc/rng.hpp"

namespace nctmc {

TrainResult train(const ExperimentConfig& config, std::ostream& metrics,
                  std::ostream* timing_log) {
  config.validate();
  const Schedule schedule = config.make_schedule();
  const ToyDataset data = config.make_dataset();
  if (data.num_states() != schedule.num_states())
    throw std::runtime_error("train: dataset and schedule state spaces disagree");
  if (data.seq_len() != config.seq_len)
    throw std::runtime_error("train: dataset and config sequence lengths disagree");
  const Objective objective = objective_from_string(config.objective);

  TrainResult result{config.make_model(schedule), false, "", 0.0, 0.0};
  TwoHeadModel& model = result.model;
  SgdMomentum optimizer(config.lr, config.momentum, model.params().size());
  Rng rng(Rng::split(config.seed, 1));  // stream 1: the training loop

  const int L = config.seq_len;
  const long window = std::max<long>(1, config.steps / 10);
  double first_sum = 0.0, last_sum = 0.0;
  long first_n = 0, last_n = 0;

  const auto t_start = std::chrono::steady_clock::now();
  std::vector<double> batch_losses(config.batch, 0.0);
  std::vector<double> batch_poisson(config.batch, 0.0);
  std::vector<double> batch_direction(config.batch, 0.0);

  for (long step = 1; step <= config.steps; ++step) {
    std::vector<double> grad(model.params().size(), 0.0);
    for (int b = 0; b < config.batch; ++b) {
      const std::vector<int> x0 = data.sample(rng);
      const double t = rng.uniform(schedule.t_lo(), schedule.t_hi());
      std::vector<int> x_t(L);
      for (int l = 0; l < L; ++l)
        x_t[l] = rng.categorical(forward_kernel(schedule, t, x0[l]));

      const HeadOutput heads = model.forward(x_t, t);
      std::vector<HeadGradient> upstream(L);
      double item_loss = 0.0, item_poisson = 0.0, item_direction = 0.0;
      for (int l = 0; l < L; ++l) {
        const LossBreakdown lb = loss_sample(objective, schedule, model, x0[l], t, x_t[l]);
        item_loss += lb.total;
        item_poisson += lb.poisson_term;
        item_direction += lb.direction_term;
        upstream[l] =
            loss_head_gradient(objective, schedule, x0[l], t, x_t[l], heads.per_position[l]);
      }
      batch_losses[b] = item_loss;
      batch_poisson[b] = item_poisson;
      batch_direction[b] = item_direction;
      const std::vector<double> g = model.backward(x_t, t, upstream);
      kernels::axpy(grad.data(), 1.0, g.data(), g.size());
    }
    const double inv_batch = 1.0 / config.batch;
    for (double& g : grad) g *= inv_batch;
    const double mean_loss = kernels::pairwise_sum(batch_losses) * inv_batch;
    const double mean_poisson = kernels::pairwise_sum(batch_poisson) * inv_batch;
    const double mean_direction = kernels::pairwise_sum(batch_direction) * inv_batch;

    if (!std::isfinite(mean_loss)) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "{\"event\":\"abort\",\"step\":%ld,\"reason\":\"non-finite loss\"}\n",
                    step);
      metrics << buf;
      result.aborted = true;
      result.abort_reason = "non-finite loss at step " + std::to_string(step);
      return result;
    }

    if (step <= window) {
      first_sum += mean_loss;
      ++first_n;
    }
    if (step > config.steps - window) {
      last_sum += mean_loss;
      ++last_n;
    }

    optimizer.step(model.params(), grad);

    if (step % config.log_interval == 0 || step == config.steps) {
      char buf[256];
      std::snprintf(buf, sizeof(buf),
                    "{\"step\":%ld,\"loss\":%.17g,\"poisson\":%.17g,\"direction\":%.17g}\n", step,
                    mean_loss, mean_poisson, mean_direction);
      metrics << buf;
      if (timing_log) {
        const auto now = std::chrono::steady_clock::now();
        const double ms =
            std::chrono::duration_cast<std::chrono::microseconds>(now - t_start).count() / 1000.0;
        *timing_log << "step " << step << " wall_clock_ms " << ms << '\n';
      }
    }
  }
  result.first_window_loss = first_n ? first_sum / first_n : 0.0;
  result.last_window_loss = last_n ? last_sum / last_n : 0.0;
  return result;
}

std::string train_summary_csv(const ExperimentConfig& config, const TrainResult& result) {
  std::ostringstream os;
  char buf[128];
  os << "steps,batch,objective,first_window_loss,last_window_loss,aborted\n";
  os << config.steps << ',' << config.batch << ',' << config.objective;
  std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,", result.first_window_loss,
                result.last_window_loss);
  os << buf << (result.aborted ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace nctmc
