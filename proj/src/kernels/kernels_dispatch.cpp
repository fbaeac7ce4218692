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

#include <cstdlib>
#include <stdexcept>

namespace nctmc {
namespace kernels {

namespace {

bool avx2_available() {
#if defined(NCTMC_HAVE_AVX2) && (defined(__x86_64__) || defined(_M_X64))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::string g_backend = "scalar";

void bind_scalar() {
  dot_ptr = &scalar::dot;
  sum_ptr = &scalar::sum;
  scale_add_ptr = &scalar::scale_add;
  axpy_ptr = &scalar::axpy;
  matvec_ptr = &scalar::matvec;
  g_backend = "scalar";
}

#if defined(NCTMC_HAVE_AVX2)
void bind_avx2() {
  dot_ptr = &avx2::dot;
  sum_ptr = &avx2::sum;
  scale_add_ptr = &avx2::scale_add;
  axpy_ptr = &avx2::axpy;
  matvec_ptr = &avx2::matvec;
  g_backend = "avx2";
}
#endif

int init_dispatch() {
  const char* env = std::getenv("NCTMC_KERNELS");
  const std::string want = env ? env : "auto";
  if (want == "scalar") {
    bind_scalar();
    return 0;
  }
#if defined(NCTMC_HAVE_AVX2)
  if (avx2_available()) {
    bind_avx2();
    return 0;
  }
#endif
  bind_scalar();
  return 0;
}

}  // namespace

DotFn dot_ptr = &scalar::dot;
SumFn sum_ptr = &scalar::sum;
ScaleAddFn scale_add_ptr = &scalar::scale_add;
AxpyFn axpy_ptr = &scalar::axpy;
MatvecFn matvec_ptr = &scalar::matvec;

namespace {
const int g_dispatch_init = init_dispatch();
}

std::string active_backend() { return g_backend; }

void select_backend(const std::string& name) {
  if (name == "scalar") {
    bind_scalar();
    return;
  }
  if (name == "avx2") {
#if defined(NCTMC_HAVE_AVX2)
    if (avx2_available()) {
      bind_avx2();
      return;
    }
#endif
    throw std::runtime_error("avx2 backend not available on this host");
  }
  if (name == "auto") {
    init_dispatch();
    return;
  }
  throw std::runtime_error("unknown kernel backend: " + name);
}

}  // namespace kernels
}  // namespace nctmc
