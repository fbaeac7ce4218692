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

#ifndef NCTMC_MODEL_HPP
#define NCTMC_MODEL_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "nctmc/ctmc.hpp"

namespace nctmc {

/// Per-position heads: (exit rate, jump distribution). Same shape as the
/// forward-process decomposition, so ExitJump is reused.
struct HeadOutput {
  std::vector<ExitJump> per_position;
};

/// Upstream gradient of a scalar loss with respect to one position's heads.
struct HeadGradient {
  double d_exit_rate = 0.0;
  std::vector<double> d_jump_dist;  // entry at the self state is ignored
};

// Reverse-process model interface: (x_t, t) -> per-position (exit rate, jump
// distribution). Time is always the forward-process time; valid window is
// [t_lo, t_hi].
class ReverseModel {
 public:
  virtual ~ReverseModel() = default;
  virtual int num_states() const = 0;
  virtual int seq_len() const = 0;
  virtual double t_lo() const = 0;
  virtual double t_hi() const = 0;
  virtual HeadOutput forward(const std::vector<int>& x, double t) const = 0;

  /// forward with t clamped into [t_lo, t_hi].
  HeadOutput forward_clamped(const std::vector<int>& x, double t) const;
  /// Single-token convenience (seq_len must be 1).
  ExitJump heads1(int state, double t) const;
};

// The trainable two-headed model. The exit-rate head is exp of a raw scalar;
// the jump head is a softmax over the S-1 non-self states (the self logit is
// never represented, so the output invariants hold by construction).
//
// tabular: independent parameters per (time bucket, state); context-free.
// mlp: 2x tanh hidden layers on [one-hot(x_pos), mean one-hot(context),
//      sinusoidal time features], shared across positions.
class TwoHeadModel : public ReverseModel {
 public:
  enum class Variant { kTabular, kMlp };

  static TwoHeadModel tabular(int num_states, int seq_len, int time_buckets, double t_lo,
                              double t_hi, std::uint64_t seed);
  static TwoHeadModel mlp(int num_states, int seq_len, int hidden_width, double t_lo, double t_hi,
                          std::uint64_t seed);

  int num_states() const override { return num_states_; }
  int seq_len() const override { return seq_len_; }
  double t_lo() const override { return t_lo_; }
  double t_hi() const override { return t_hi_; }
  HeadOutput forward(const std::vector<int>& x, double t) const override;

  /// Analytic parameter gradient for the given upstream head gradients;
  /// recomputes the forward pass internally.
  std::vector<double> backward(const std::vector<int>& x, double t,
                               const std::vector<HeadGradient>& upstream) const;

  Variant variant() const { return variant_; }
  int time_buckets() const { return time_buckets_; }
  int hidden_width() const { return hidden_width_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  /// Tabular only: flat parameter offset of the (bucket, state) block.
  std::size_t tabular_block_offset(int bucket, int state) const;
  int bucket_of(double t) const;

  /// Text checkpoint: header line, then one parameter per line with 17
  /// significant digits (bit round-trip for doubles).
  void save(std::ostream& os) const;
  static TwoHeadModel load(std::istream& is);
  void save_file(const std::string& path) const;
  static TwoHeadModel load_file(const std::string& path);

 private:
  TwoHeadModel() = default;

  void forward_mlp_position(const std::vector<int>& x, int pos, double t,
                            std::vector<double>* h1, std::vector<double>* h2,
                            std::vector<double>* out, std::vector<double>* feats) const;
  std::vector<double> time_features(double t) const;

  Variant variant_ = Variant::kTabular;
  int num_states_ = 0;
  int seq_len_ = 1;
  int time_buckets_ = 0;
  int hidden_width_ = 0;
  double t_lo_ = 0.0;
  double t_hi_ = 1.0;
  std::vector<double> params_;

  // mlp layout offsets, fixed at construction
  std::size_t w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0, w3_ = 0, b3_ = 0;
  int in_dim_ = 0, out_dim_ = 0;
  void set_mlp_offsets();
};

/// Masked-process view: at the mask state the exit rate is the schedule
/// constant -alpha'_t/(1-alpha_t) and the jump head is the supplied
/// clean-token predictor; every other state is an absorbing zero-rate
/// sentinel.
class MaskedHeadAdapter : public ReverseModel {
 public:
  using CleanPredictor =
      std::function<std::vector<double>(const std::vector<int>&, int, double)>;

  MaskedHeadAdapter(Schedule schedule, CleanPredictor predictor);

  int num_states() const override { return schedule_.num_states(); }
  int seq_len() const override { return seq_len_; }
  double t_lo() const override { return schedule_.t_lo(); }
  double t_hi() const override { return schedule_.t_hi(); }
  HeadOutput forward(const std::vector<int>& x, double t) const override;

  void set_seq_len(int value) { seq_len_ = value; }

 private:
  Schedule schedule_;
  CleanPredictor predictor_;
  int seq_len_ = 1;
};

/// Oracle-backed model: per-position exact marginal reverse targets under a
/// factorized data distribution (one marginal per position).
class ExactMarginalReverseModel : public ReverseModel {
 public:
  ExactMarginalReverseModel(Schedule schedule, std::vector<std::vector<double>> position_marginals);

  int num_states() const override { return schedule_.num_states(); }
  int seq_len() const override { return static_cast<int>(marginals_.size()); }
  double t_lo() const override { return schedule_.t_lo(); }
  double t_hi() const override { return schedule_.t_hi(); }
  HeadOutput forward(const std::vector<int>& x, double t) const override;

 private:
  Schedule schedule_;
  std::vector<std::vector<double>> marginals_;
};

/// Gradient-descent-with-momentum parameter update (the only optimizer).
class SgdMomentum {
 public:
  SgdMomentum(double lr, double momentum, std::size_t dim)
      : lr_(lr), momentum_(momentum), velocity_(dim, 0.0) {}
  void step(std::vector<double>& params, const std::vector<double>& grad);

 private:
  double lr_;
  double momentum_;
  std::vector<double> velocity_;
};

}  // namespace nctmc

#endif  // NCTMC_MODEL_HPP
