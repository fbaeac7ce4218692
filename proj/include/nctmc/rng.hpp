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

#ifndef NCTMC_RNG_HPP
#define NCTMC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace nctmc {

// Seeded generator with hand-rolled sampling transforms. std::mt19937_64 has
// a standard-mandated sequence, and none of the std distributions are used,
// so outputs are identical across platforms and toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Exponential with the given rate; rate <= 0 yields +infinity (no event).
  double exponential(double rate) {
    if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
    return -std::log1p(-uniform()) / rate;
  }

  /// Standard exponential (rate 1).
  double exp1() { return -std::log1p(-uniform()); }

  /// Integer in [0, n) by scaling; n must be positive.
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    int k = static_cast<int>(uniform() * n);
    return k >= n ? n - 1 : k;
  }

  /// Inverse-CDF draw from an unnormalized nonnegative weight vector.
  int categorical(const std::vector<double>& w) {
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total > 0.0)) throw std::invalid_argument("categorical: no positive mass");
    double u = uniform() * total;
    double acc = 0.0;
    int last_positive = -1;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] <= 0.0) continue;
      acc += w[j];
      last_positive = static_cast<int>(j);
      if (u < acc) return last_positive;
    }
    return last_positive;
  }

  /// Seed-splitting rule for independent per-item streams: the child seed for
  /// item k under master seed s is splitmix64(s + (k+1)*0x9E3779B97F4A7C15).
  /// Documented so sharded batch generation stays bit-identical to sequential.
  static std::uint64_t split(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace nctmc

#endif  // NCTMC_RNG_HPP
