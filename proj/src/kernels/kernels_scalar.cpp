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

#include "nctmc/kernels.hpp"

namespace nctmc {
namespace kernels {
namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

void scale_add(double* dst, double sa, const double* a, double sb, const double* b,
               std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = sa * a[i] + sb * b[i];
}

void axpy(double* y, double s, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += s * x[i];
}

void matvec(double* y, const double* m, std::size_t rows, std::size_t cols, const double* x) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(m + r * cols, x, cols);
}

}  // namespace scalar

double pairwise_sum(const double* a, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double acc = a[0];
    for (std::size_t i = 1; i < n; ++i) acc += a[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(a, half) + pairwise_sum(a + half, n - half);
}

double pairwise_sum(const std::vector<double>& a) { return pairwise_sum(a.data(), a.size()); }

}  // namespace kernels
}  // namespace nctmc
