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

#ifndef NCTMC_KERNELS_HPP
#define NCTMC_KERNELS_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace nctmc {
namespace kernels {

// Dense double-precision primitives behind the hot loops (probability-vector
// mixing, KL reductions, MLP matvecs). Each op has a scalar reference
// implementation and an AVX2 variant; the active variant is chosen once at
// startup from CPUID and can be overridden with NCTMC_KERNELS=scalar.
//
// Reductions may reassociate, so SIMD results can differ from scalar in the
// last ulps; elementwise ops do not. exp/log stay scalar in both lanes.

using DotFn = double (*)(const double*, const double*, std::size_t);
using SumFn = double (*)(const double*, std::size_t);
using ScaleAddFn = void (*)(double*, double, const double*, double, const double*, std::size_t);
using AxpyFn = void (*)(double*, double, const double*, std::size_t);
using MatvecFn = void (*)(double*, const double*, std::size_t, std::size_t, const double*);

extern DotFn dot_ptr;
extern SumFn sum_ptr;
extern ScaleAddFn scale_add_ptr;
extern AxpyFn axpy_ptr;
extern MatvecFn matvec_ptr;

inline double dot(const double* a, const double* b, std::size_t n) { return dot_ptr(a, b, n); }
inline double sum(const double* a, std::size_t n) { return sum_ptr(a, n); }

/// dst[i] = sa*a[i] + sb*b[i]
inline void scale_add(double* dst, double sa, const double* a, double sb, const double* b,
                      std::size_t n) {
  scale_add_ptr(dst, sa, a, sb, b, n);
}

/// y[i] += s*x[i]
inline void axpy(double* y, double s, const double* x, std::size_t n) { axpy_ptr(y, s, x, n); }

/// y = M x with M row-major (rows x cols)
inline void matvec(double* y, const double* m, std::size_t rows, std::size_t cols,
                   const double* x) {
  matvec_ptr(y, m, rows, cols, x);
}

// Scalar reference implementations, always available (equivalence tests).
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
void scale_add(double* dst, double sa, const double* a, double sb, const double* b, std::size_t n);
void axpy(double* y, double s, const double* x, std::size_t n);
void matvec(double* y, const double* m, std::size_t rows, std::size_t cols, const double* x);
}  // namespace scalar

#if defined(NCTMC_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
void scale_add(double* dst, double sa, const double* a, double sb, const double* b, std::size_t n);
void axpy(double* y, double s, const double* x, std::size_t n);
void matvec(double* y, const double* m, std::size_t rows, std::size_t cols, const double* x);
}  // namespace avx2
#endif

/// Name of the dispatched backend: "avx2" or "scalar".
std::string active_backend();

/// Force a backend by name ("scalar", "avx2", "auto"); throws on unknown or
/// unavailable names. Intended for tests and benchmarking.
void select_backend(const std::string& name);

/// Fixed-order pairwise (tree) summation. Independent of the SIMD backend so
/// batch reductions are bit-stable regardless of dispatch or worker count.
double pairwise_sum(const double* a, std::size_t n);
double pairwise_sum(const std::vector<double>& a);

}  // namespace kernels
}  // namespace nctmc

#endif  // NCTMC_KERNELS_HPP
