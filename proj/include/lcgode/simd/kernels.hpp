// Copyright 2026 The lcgode Authors. All Rights Reserved.
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

#pragma once

// Dense double-precision kernels used by the autodiff tape and the optimizer.
//
// Every kernel exists as a scalar reference implementation. When the binary
// was built with AVX2 support compiled in and the running CPU reports AVX2+FMA,
// an AVX2 variant is selected at startup. Setting LCGODE_SIMD=scalar in the
// environment forces the reference path.

#include <cstddef>
#include <string_view>

namespace lcgode::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

enum class Trans : bool { no = false, yes = true };

/// Row-major GEMM: C(m x n) = op(A) * op(B), or C += ... when accumulate.
/// op(A) is m x k; A is stored k x m when transposed. Same for B.
using GemmFn = void (*)(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k,
                        const double* a, const double* b, double* c, bool accumulate);
/// y += alpha * x
using AxpyFn = void (*)(std::size_t n, double alpha, const double* x, double* y);
/// out = x * y (elementwise)
using MulFn = void (*)(std::size_t n, const double* x, const double* y, double* out);
/// out += x * y (elementwise)
using MulAccFn = void (*)(std::size_t n, const double* x, const double* y, double* out);
using DotFn = double (*)(std::size_t n, const double* x, const double* y);

struct AdamWCoefficients {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double weight_decay;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};
/// In-place decoupled-weight-decay Adam update over n contiguous values.
using AdamWFn = void (*)(std::size_t n, const AdamWCoefficients& k, const double* grad,
                         double* param, double* m, double* v);

struct KernelTable {
  Isa isa;
  GemmFn gemm;
  AxpyFn axpy;
  MulFn mul;
  MulAccFn mul_acc;
  DotFn dot;
  AdamWFn adamw;
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 translation unit was not compiled in.
const KernelTable* avx2_kernels();

bool cpu_supports_avx2();

/// The table chosen for this process.
const KernelTable& active();

/// Override the active table (tests, benchmarks). Throws if unavailable.
void select(Isa isa);

}  // namespace lcgode::simd
