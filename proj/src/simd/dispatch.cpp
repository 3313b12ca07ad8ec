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

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "lcgode/simd/kernels.hpp"

namespace lcgode::simd {

#ifndef LCGODE_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool cpu_supports_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable* detect() {
  if (const char* env = std::getenv("LCGODE_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return &scalar_kernels();
  }
  if (avx2_kernels() != nullptr && cpu_supports_avx2()) return avx2_kernels();
  return &scalar_kernels();
}

const KernelTable*& current() {
  static const KernelTable* table = detect();
  return table;
}

}  // namespace

const KernelTable& active() { return *current(); }

void select(Isa isa) {
  if (isa == Isa::scalar) {
    current() = &scalar_kernels();
    return;
  }
  if (avx2_kernels() == nullptr || !cpu_supports_avx2()) {
    throw std::runtime_error("avx2 kernels are not available on this build/CPU");
  }
  current() = avx2_kernels();
}

}  // namespace lcgode::simd
