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

#include "nctmc/dataset.hpp"

#include <cmath>
#include <stdexcept>

#include "nctmc/ctmc.hpp"

namespace nctmc {

namespace {
constexpr int kGridSide = 8;
constexpr long kEnumerationCap = 65536;
}  // namespace

ToyDataset ToyDataset::categorical_iid(std::vector<double> probs, int seq_len) {
  if (probs.size() < 2 || probs.size() > 16)
    throw std::invalid_argument("categorical_iid: need 2..16 states");
  if (seq_len < 1) throw std::invalid_argument("categorical_iid: seq_len must be >= 1");
  require_probability_vector(probs);
  ToyDataset d;
  d.kind_ = Kind::kCategoricalIid;
  d.num_states_ = static_cast<int>(probs.size());
  d.seq_len_ = seq_len;
  d.probs_ = std::move(probs);
  return d;
}

ToyDataset ToyDataset::markov(std::vector<double> init, std::vector<double> transition,
                              int seq_len) {
  const int S = static_cast<int>(init.size());
  if (S < 2 || S > 16) throw std::invalid_argument("markov: need 2..16 states");
  if (seq_len < 1 || seq_len > 32) throw std::invalid_argument("markov: seq_len must be in 1..32");
  require_probability_vector(init);
  if (static_cast<int>(transition.size()) != S * S)
    throw std::invalid_argument("markov: transition must be S x S");
  for (int i = 0; i < S; ++i) {
    std::vector<double> row(transition.begin() + static_cast<std::size_t>(i) * S,
                            transition.begin() + static_cast<std::size_t>(i + 1) * S);
    require_probability_vector(row);
  }
  ToyDataset d;
  d.kind_ = Kind::kMarkovSequences;
  d.num_states_ = S;
  d.seq_len_ = seq_len;
  d.init_ = std::move(init);
  d.transition_ = std::move(transition);
  return d;
}

ToyDataset ToyDataset::grid_image() {
  ToyDataset d;
  d.kind_ = Kind::kGridImage;
  d.num_states_ = 2;
  d.seq_len_ = kGridSide * kGridSide;
  return d;
}

std::vector<int> ToyDataset::sample(Rng& rng) const {
  std::vector<int> x(seq_len_, 0);
  switch (kind_) {
    case Kind::kCategoricalIid:
      for (int l = 0; l < seq_len_; ++l) x[l] = rng.categorical(probs_);
      return x;
    case Kind::kMarkovSequences: {
      int cur = rng.categorical(init_);
      x[0] = cur;
      for (int l = 1; l < seq_len_; ++l) {
        std::vector<double> row(transition_.begin() + static_cast<std::size_t>(cur) * num_states_,
                                transition_.begin() +
                                    static_cast<std::size_t>(cur + 1) * num_states_);
        cur = rng.categorical(row);
        x[l] = cur;
      }
      return x;
    }
    case Kind::kGridImage: {
      // one filled axis-aligned rectangle per image
      const int r0 = rng.uniform_int(kGridSide);
      const int r1 = rng.uniform_int(kGridSide);
      const int c0 = rng.uniform_int(kGridSide);
      const int c1 = rng.uniform_int(kGridSide);
      const int rlo = std::min(r0, r1), rhi = std::max(r0, r1);
      const int clo = std::min(c0, c1), chi = std::max(c0, c1);
      for (int r = rlo; r <= rhi; ++r)
        for (int c = clo; c <= chi; ++c) x[r * kGridSide + c] = 1;
      return x;
    }
  }
  throw std::logic_error("ToyDataset::sample: bad kind");
}

std::vector<double> ToyDataset::position_marginal(int pos) const {
  if (pos < 0 || pos >= seq_len_)
    throw std::invalid_argument("position_marginal: position out of range");
  switch (kind_) {
    case Kind::kCategoricalIid:
      return probs_;
    case Kind::kMarkovSequences: {
      std::vector<double> p = init_;
      std::vector<double> next(num_states_, 0.0);
      for (int l = 0; l < pos; ++l) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int i = 0; i < num_states_; ++i)
          for (int j = 0; j < num_states_; ++j)
            next[j] += p[i] * transition_[static_cast<std::size_t>(i) * num_states_ + j];
        p.swap(next);
      }
      return p;
    }
    case Kind::kGridImage: {
      // P(cell = 1) = P(a uniform rectangle covers the cell), enumerated over
      // the 8^4 corner draws.
      const int r = pos / kGridSide;
      const int c = pos % kGridSide;
      long covered = 0;
      for (int r0 = 0; r0 < kGridSide; ++r0)
        for (int r1 = 0; r1 < kGridSide; ++r1)
          for (int c0 = 0; c0 < kGridSide; ++c0)
            for (int c1 = 0; c1 < kGridSide; ++c1) {
              const bool row_in = r >= std::min(r0, r1) && r <= std::max(r0, r1);
              const bool col_in = c >= std::min(c0, c1) && c <= std::max(c0, c1);
              if (row_in && col_in) ++covered;
            }
      const double p1 = static_cast<double>(covered) / (kGridSide * kGridSide * kGridSide * kGridSide);
      return {1.0 - p1, p1};
    }
  }
  throw std::logic_error("ToyDataset::position_marginal: bad kind");
}

bool ToyDataset::enumerable() const {
  if (kind_ == Kind::kGridImage) return false;
  double count = 1.0;
  for (int l = 0; l < seq_len_; ++l) {
    count *= num_states_;
    if (count > kEnumerationCap) return false;
  }
  return true;
}

std::vector<std::pair<double, std::vector<int>>> ToyDataset::enumerate() const {
  if (!enumerable()) throw std::logic_error("ToyDataset::enumerate: not enumerable");
  std::vector<std::pair<double, std::vector<int>>> out;
  std::vector<int> x(seq_len_, 0);
  while (true) {
    double p = 1.0;
    if (kind_ == Kind::kCategoricalIid) {
      for (int l = 0; l < seq_len_; ++l) p *= probs_[x[l]];
    } else {
      p = init_[x[0]];
      for (int l = 1; l < seq_len_; ++l)
        p *= transition_[static_cast<std::size_t>(x[l - 1]) * num_states_ + x[l]];
    }
    if (p > 0.0) out.emplace_back(p, x);
    int l = seq_len_ - 1;
    while (l >= 0 && ++x[l] == num_states_) x[l--] = 0;
    if (l < 0) break;
  }
  return out;
}

}  // namespace nctmc
