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

#include "nctmc/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nctmc/kernels.hpp"
#include "nctmc/rng.hpp"

namespace nctmc {

namespace {

// slot k of state s covers destination states {0..S-1} \ {s}
inline int slot_to_state(int slot, int self) { return slot < self ? slot : slot + 1; }
inline int state_to_slot(int state, int self) { return state < self ? state : state - 1; }

void softmax_inplace(std::vector<double>& v) {
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  double total = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    total += x;
  }
  for (double& x : v) x /= total;
}

}  // namespace

HeadOutput ReverseModel::forward_clamped(const std::vector<int>& x, double t) const {
  return forward(x, std::min(std::max(t, t_lo()), t_hi()));
}

ExitJump ReverseModel::heads1(int state, double t) const {
  return forward_clamped(std::vector<int>{state}, t).per_position.at(0);
}

void TwoHeadModel::set_mlp_offsets() {
  in_dim_ = 2 * num_states_ + 9;
  out_dim_ = num_states_;  // 1 exit logit + (S-1) direction logits
  const int h = hidden_width_;
  w1_ = 0;
  b1_ = w1_ + static_cast<std::size_t>(h) * in_dim_;
  w2_ = b1_ + h;
  b2_ = w2_ + static_cast<std::size_t>(h) * h;
  w3_ = b2_ + h;
  b3_ = w3_ + static_cast<std::size_t>(out_dim_) * h;
}

TwoHeadModel TwoHeadModel::tabular(int num_states, int seq_len, int time_buckets, double t_lo,
                                   double t_hi, std::uint64_t seed) {
  if (num_states < 2) throw std::invalid_argument("TwoHeadModel: need >= 2 states");
  if (time_buckets < 1) throw std::invalid_argument("TwoHeadModel: need >= 1 bucket");
  if (!(t_lo < t_hi)) throw std::invalid_argument("TwoHeadModel: bad time window");
  TwoHeadModel m;
  m.variant_ = Variant::kTabular;
  m.num_states_ = num_states;
  m.seq_len_ = seq_len;
  m.time_buckets_ = time_buckets;
  m.t_lo_ = t_lo;
  m.t_hi_ = t_hi;
  m.params_.assign(static_cast<std::size_t>(time_buckets) * num_states * num_states, 0.0);
  Rng rng(seed);
  for (int b = 0; b < time_buckets; ++b) {
    for (int s = 0; s < num_states; ++s) {
      // raw exit parameter in [log 0.5, log 2], direction logits exactly zero
      m.params_[m.tabular_block_offset(b, s)] = rng.uniform(std::log(0.5), std::log(2.0));
    }
  }
  return m;
}

TwoHeadModel TwoHeadModel::mlp(int num_states, int seq_len, int hidden_width, double t_lo,
                               double t_hi, std::uint64_t seed) {
  if (num_states < 2) throw std::invalid_argument("TwoHeadModel: need >= 2 states");
  if (hidden_width < 1) throw std::invalid_argument("TwoHeadModel: need >= 1 hidden unit");
  if (!(t_lo < t_hi)) throw std::invalid_argument("TwoHeadModel: bad time window");
  TwoHeadModel m;
  m.variant_ = Variant::kMlp;
  m.num_states_ = num_states;
  m.seq_len_ = seq_len;
  m.hidden_width_ = hidden_width;
  m.t_lo_ = t_lo;
  m.t_hi_ = t_hi;
  m.set_mlp_offsets();
  const int h = hidden_width;
  m.params_.assign(m.b3_ + m.out_dim_, 0.0);
  Rng rng(seed);
  const double a1 = std::sqrt(6.0 / (m.in_dim_ + h));
  for (std::size_t k = m.w1_; k < m.b1_; ++k) m.params_[k] = rng.uniform(-a1, a1);
  const double a2 = std::sqrt(6.0 / (h + h));
  for (std::size_t k = m.w2_; k < m.b2_; ++k) m.params_[k] = rng.uniform(-a2, a2);
  // Output layer starts at zero so the heads open at lambda in [0.5, 2] and an
  // exactly uniform jump distribution.
  m.params_[m.b3_] = rng.uniform(std::log(0.5), std::log(2.0));
  return m;
}

std::size_t TwoHeadModel::tabular_block_offset(int bucket, int state) const {
  return (static_cast<std::size_t>(bucket) * num_states_ + state) * num_states_;
}

int TwoHeadModel::bucket_of(double t) const {
  const double u = (t - t_lo_) / (t_hi_ - t_lo_);
  int b = static_cast<int>(u * time_buckets_);
  return std::min(std::max(b, 0), time_buckets_ - 1);
}

std::vector<double> TwoHeadModel::time_features(double t) const {
  const double u = (t - t_lo_) / (t_hi_ - t_lo_);
  std::vector<double> f;
  f.reserve(9);
  f.push_back(u);
  const double two_pi = 6.28318530717958647692;
  for (int k = 1; k <= 4; ++k) {
    f.push_back(std::sin(two_pi * k * u));
    f.push_back(std::cos(two_pi * k * u));
  }
  return f;
}

void TwoHeadModel::forward_mlp_position(const std::vector<int>& x, int pos, double t,
                                        std::vector<double>* h1, std::vector<double>* h2,
                                        std::vector<double>* out,
                                        std::vector<double>* feats) const {
  const int S = num_states_;
  const int L = static_cast<int>(x.size());
  feats->assign(in_dim_, 0.0);
  (*feats)[x[pos]] = 1.0;
  for (int l = 0; l < L; ++l) (*feats)[S + x[l]] += 1.0 / L;
  const std::vector<double> tf = time_features(t);
  for (std::size_t k = 0; k < tf.size(); ++k) (*feats)[2 * S + k] = tf[k];

  const int h = hidden_width_;
  h1->assign(h, 0.0);
  kernels::matvec(h1->data(), params_.data() + w1_, h, in_dim_, feats->data());
  for (int k = 0; k < h; ++k) (*h1)[k] = std::tanh((*h1)[k] + params_[b1_ + k]);
  h2->assign(h, 0.0);
  kernels::matvec(h2->data(), params_.data() + w2_, h, h, h1->data());
  for (int k = 0; k < h; ++k) (*h2)[k] = std::tanh((*h2)[k] + params_[b2_ + k]);
  out->assign(out_dim_, 0.0);
  kernels::matvec(out->data(), params_.data() + w3_, out_dim_, h, h2->data());
  for (int k = 0; k < out_dim_; ++k) (*out)[k] += params_[b3_ + k];
}

HeadOutput TwoHeadModel::forward(const std::vector<int>& x, double t) const {
  const int S = num_states_;
  if (!(t >= t_lo_ && t <= t_hi_))
    throw std::domain_error("TwoHeadModel::forward: t outside the model window");
  for (int s : x)
    if (s < 0 || s >= S) throw std::domain_error("TwoHeadModel::forward: state out of range");
  HeadOutput outputs;
  outputs.per_position.resize(x.size());
  if (variant_ == Variant::kTabular) {
    const int b = bucket_of(t);
    for (std::size_t pos = 0; pos < x.size(); ++pos) {
      const int s = x[pos];
      const std::size_t off = tabular_block_offset(b, s);
      ExitJump& ej = outputs.per_position[pos];
      ej.exit_rate = std::exp(params_[off]);
      std::vector<double> slots(params_.begin() + off + 1, params_.begin() + off + S);
      softmax_inplace(slots);
      ej.jump_dist.assign(S, 0.0);
      for (int k = 0; k + 1 < S; ++k) ej.jump_dist[slot_to_state(k, s)] = slots[k];
    }
    return outputs;
  }
  std::vector<double> h1, h2, out, feats;
  for (std::size_t pos = 0; pos < x.size(); ++pos) {
    forward_mlp_position(x, static_cast<int>(pos), t, &h1, &h2, &out, &feats);
    const int s = x[pos];
    ExitJump& ej = outputs.per_position[pos];
    ej.exit_rate = std::exp(out[0]);
    std::vector<double> slots(out.begin() + 1, out.end());
    softmax_inplace(slots);
    ej.jump_dist.assign(S, 0.0);
    for (int k = 0; k + 1 < S; ++k) ej.jump_dist[slot_to_state(k, s)] = slots[k];
  }
  return outputs;
}

std::vector<double> TwoHeadModel::backward(const std::vector<int>& x, double t,
                                           const std::vector<HeadGradient>& upstream) const {
  const int S = num_states_;
  if (upstream.size() != x.size())
    throw std::invalid_argument("TwoHeadModel::backward: upstream size mismatch");
  std::vector<double> grad(params_.size(), 0.0);

  if (variant_ == Variant::kTabular) {
    const int b = bucket_of(std::min(std::max(t, t_lo_), t_hi_));
    for (std::size_t pos = 0; pos < x.size(); ++pos) {
      const int s = x[pos];
      const std::size_t off = tabular_block_offset(b, s);
      const double lam = std::exp(params_[off]);
      std::vector<double> slots(params_.begin() + off + 1, params_.begin() + off + S);
      softmax_inplace(slots);
      grad[off] += upstream[pos].d_exit_rate * lam;
      if (!upstream[pos].d_jump_dist.empty()) {
        double gr_dot = 0.0;
        std::vector<double> g(S - 1);
        for (int k = 0; k + 1 < S; ++k) {
          g[k] = upstream[pos].d_jump_dist[slot_to_state(k, s)];
          gr_dot += g[k] * slots[k];
        }
        for (int k = 0; k + 1 < S; ++k) grad[off + 1 + k] += slots[k] * (g[k] - gr_dot);
      }
    }
    return grad;
  }

  const int h = hidden_width_;
  std::vector<double> h1, h2, out, feats;
  std::vector<double> d_out(out_dim_), d_h2(h), d_h1(h), tmp(h);
  const double tc = std::min(std::max(t, t_lo_), t_hi_);
  for (std::size_t pos = 0; pos < x.size(); ++pos) {
    forward_mlp_position(x, static_cast<int>(pos), tc, &h1, &h2, &out, &feats);
    const int s = x[pos];
    const double lam = std::exp(out[0]);
    std::vector<double> slots(out.begin() + 1, out.end());
    softmax_inplace(slots);

    std::fill(d_out.begin(), d_out.end(), 0.0);
    d_out[0] = upstream[pos].d_exit_rate * lam;
    if (!upstream[pos].d_jump_dist.empty()) {
      double gr_dot = 0.0;
      std::vector<double> g(S - 1);
      for (int k = 0; k + 1 < S; ++k) {
        g[k] = upstream[pos].d_jump_dist[slot_to_state(k, s)];
        gr_dot += g[k] * slots[k];
      }
      for (int k = 0; k + 1 < S; ++k) d_out[1 + k] = slots[k] * (g[k] - gr_dot);
    }

    // output layer
    for (int r = 0; r < out_dim_; ++r) {
      kernels::axpy(grad.data() + w3_ + static_cast<std::size_t>(r) * h, d_out[r], h2.data(), h);
      grad[b3_ + r] += d_out[r];
    }
    // d_h2 = W3^T d_out
    std::fill(d_h2.begin(), d_h2.end(), 0.0);
    for (int r = 0; r < out_dim_; ++r)
      kernels::axpy(d_h2.data(), d_out[r], params_.data() + w3_ + static_cast<std::size_t>(r) * h,
                    h);
    for (int k = 0; k < h; ++k) d_h2[k] *= (1.0 - h2[k] * h2[k]);
    for (int r = 0; r < h; ++r) {
      kernels::axpy(grad.data() + w2_ + static_cast<std::size_t>(r) * h, d_h2[r], h1.data(), h);
      grad[b2_ + r] += d_h2[r];
    }
    std::fill(d_h1.begin(), d_h1.end(), 0.0);
    for (int r = 0; r < h; ++r)
      kernels::axpy(d_h1.data(), d_h2[r], params_.data() + w2_ + static_cast<std::size_t>(r) * h,
                    h);
    for (int k = 0; k < h; ++k) d_h1[k] *= (1.0 - h1[k] * h1[k]);
    for (int r = 0; r < h; ++r) {
      kernels::axpy(grad.data() + w1_ + static_cast<std::size_t>(r) * in_dim_, d_h1[r],
                    feats.data(), in_dim_);
      grad[b1_ + r] += d_h1[r];
    }
  }
  return grad;
}

void TwoHeadModel::save(std::ostream& os) const {
  char buf[64];
  const char* name = variant_ == Variant::kTabular ? "tabular" : "mlp";
  const int aux = variant_ == Variant::kTabular ? time_buckets_ : hidden_width_;
  os << name << ' ' << num_states_ << ' ' << seq_len_ << ' ' << aux;
  std::snprintf(buf, sizeof(buf), " %.17g %.17g", t_lo_, t_hi_);
  os << buf << ' ' << params_.size() << '\n';
  for (double p : params_) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", p);
    os << buf;
  }
}

TwoHeadModel TwoHeadModel::load(std::istream& is) {
  std::string name;
  int S = 0, L = 0, aux = 0;
  double lo = 0.0, hi = 0.0;
  std::size_t n = 0;
  if (!(is >> name >> S >> L >> aux >> lo >> hi >> n))
    throw std::runtime_error("checkpoint: bad header");
  TwoHeadModel m;
  if (name == "tabular") {
    m = tabular(S, L, aux, lo, hi, 0);
  } else if (name == "mlp") {
    m = mlp(S, L, aux, lo, hi, 0);
  } else {
    throw std::runtime_error("checkpoint: unknown variant " + name);
  }
  if (m.params_.size() != n) throw std::runtime_error("checkpoint: parameter count mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(is >> m.params_[k])) throw std::runtime_error("checkpoint: truncated parameters");
  }
  return m;
}

void TwoHeadModel::save_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  save(os);
}

TwoHeadModel TwoHeadModel::load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  return load(is);
}

MaskedHeadAdapter::MaskedHeadAdapter(Schedule schedule, CleanPredictor predictor)
    : schedule_(std::move(schedule)), predictor_(std::move(predictor)) {
  if (schedule_.kind() != ScheduleKind::kMasked)
    throw UnsupportedScheduleError("MaskedHeadAdapter needs a masked schedule");
}

HeadOutput MaskedHeadAdapter::forward(const std::vector<int>& x, double t) const {
  const int S = schedule_.num_states();
  const int m = schedule_.mask_state();
  const double gamma = schedule_.rate_scale(t) * schedule_.alpha(t) / schedule_.beta(t);
  HeadOutput out;
  out.per_position.resize(x.size());
  for (std::size_t pos = 0; pos < x.size(); ++pos) {
    ExitJump& ej = out.per_position[pos];
    ej.jump_dist.assign(S, 0.0);
    if (x[pos] != m) {
      ej.zero_rate = true;  // unmasked tokens are absorbing in the reverse chain
      continue;
    }
    ej.exit_rate = gamma;
    const std::vector<double> clean = predictor_(x, static_cast<int>(pos), t);
    if (static_cast<int>(clean.size()) != S - 1)
      throw std::invalid_argument("MaskedHeadAdapter: predictor must cover the vocabulary");
    for (int j = 0; j + 1 < S; ++j) ej.jump_dist[j] = clean[j];
  }
  return out;
}

ExactMarginalReverseModel::ExactMarginalReverseModel(
    Schedule schedule, std::vector<std::vector<double>> position_marginals)
    : schedule_(std::move(schedule)), marginals_(std::move(position_marginals)) {
  for (const auto& p : marginals_) {
    if (static_cast<int>(p.size()) != schedule_.num_states())
      throw std::invalid_argument("ExactMarginalReverseModel: marginal size mismatch");
    require_probability_vector(p);
  }
}

HeadOutput ExactMarginalReverseModel::forward(const std::vector<int>& x, double t) const {
  HeadOutput out;
  out.per_position.resize(x.size());
  for (std::size_t pos = 0; pos < x.size(); ++pos) {
    const ReverseTarget target = marginal_reverse(schedule_, marginals_[pos], t, x[pos]);
    ExitJump& ej = out.per_position[pos];
    ej.exit_rate = target.exit_rate;
    ej.jump_dist = target.jump_dist;
    ej.zero_rate = target.zero_rate;
  }
  return out;
}

void SgdMomentum::step(std::vector<double>& params, const std::vector<double>& grad) {
  if (params.size() != velocity_.size() || grad.size() != velocity_.size())
    throw std::invalid_argument("SgdMomentum: dimension mismatch");
  for (std::size_t k = 0; k < params.size(); ++k) {
    velocity_[k] = momentum_ * velocity_[k] - lr_ * grad[k];
    params[k] += velocity_[k];
  }
}

}  // namespace nctmc
