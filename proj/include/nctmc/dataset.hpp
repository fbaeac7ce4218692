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

#ifndef NCTMC_DATASET_HPP
#define NCTMC_DATASET_HPP

#include <string>
#include <utility>
#include <vector>

#include "nctmc/rng.hpp"

namespace nctmc {

// Toy corpora for training and oracles:
//   categorical_iid  — iid per-position categorical over S <= 16
//   markov_sequences — order-1 Markov chains, enumerable for S^L <= 65536
//   grid_image       — random filled rectangles on an 8x8 binary grid (L=64)
class ToyDataset {
 public:
  enum class Kind { kCategoricalIid, kMarkovSequences, kGridImage };

  static ToyDataset categorical_iid(std::vector<double> probs, int seq_len);
  static ToyDataset markov(std::vector<double> init, std::vector<double> transition, int seq_len);
  static ToyDataset grid_image();

  Kind kind() const { return kind_; }
  int num_states() const { return num_states_; }
  int seq_len() const { return seq_len_; }

  std::vector<int> sample(Rng& rng) const;

  /// Exact marginal of one position (all kinds).
  std::vector<double> position_marginal(int pos) const;

  /// Whether the joint distribution is exactly enumerable.
  bool enumerable() const;
  std::vector<std::pair<double, std::vector<int>>> enumerate() const;

 private:
  ToyDataset() = default;
  Kind kind_ = Kind::kCategoricalIid;
  int num_states_ = 2;
  int seq_len_ = 1;
  std::vector<double> probs_;       // iid
  std::vector<double> init_;        // markov
  std::vector<double> transition_;  // markov, row-major S x S
};

}  // namespace nctmc

#endif  // NCTMC_DATASET_HPP
