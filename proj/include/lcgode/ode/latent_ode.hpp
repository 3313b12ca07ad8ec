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

// Autonomous latent ODE dz/dt = f([z || z_G]), classical RK4 integration and
// the per-state decoder.
//
// rk4_step / integrate are generic over the state type: ad::Var for training
// (gradients flow through every solver stage) and Matrix for plain
// evaluation.

#include <cmath>
#include <fmt/format.h>
#include <span>
#include <vector>

#include "lcgode/autodiff/errors.hpp"
#include "lcgode/autodiff/params.hpp"
#include "lcgode/autodiff/tape.hpp"
#include "lcgode/rng.hpp"

namespace lcgode::ode {

class IntegrationError : public Error {
 public:
  IntegrationError(std::size_t step, const std::string& what)
      : Error(fmt::format("integration aborted at step {}: {}", step, what)), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

inline const Matrix& state_values(const Matrix& m) { return m; }
inline const Matrix& state_values(const ad::Var& v) { return v.value(); }

/// One classical fourth-order Runge-Kutta step of size h for an autonomous
/// field. step_index is only used for error reporting.
template <class State, class Field>
State rk4_step(const Field& f, const State& z, double h, std::size_t step_index = 0) {
  if (!(h > 0.0)) throw IntegrationError(step_index, fmt::format("step size {} is not positive", h));
  auto check = [&](const State& s, const char* stage) {
    if (!state_values(s).all_finite()) throw IntegrationError(step_index, fmt::format("non-finite {}", stage));
  };
  const State k1 = f(z);
  check(k1, "k1");
  const State k2 = f(z + (0.5 * h) * k1);
  check(k2, "k2");
  const State k3 = f(z + (0.5 * h) * k2);
  check(k3, "k3");
  const State k4 = f(z + h * k3);
  check(k4, "k4");
  State next = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  check(next, "state");
  return next;
}

/// Returns one state per entry of `times`; times[0] is the time of z0. Each gap
/// is covered by `substeps` equal RK4 steps.
template <class State, class Field>
std::vector<State> integrate(const Field& f, const State& z0, std::span<const double> times, std::size_t substeps = 1) {
  if (times.empty()) throw Error("integrate: empty time grid");
  if (substeps == 0) throw Error("integrate: substeps must be positive");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw Error(fmt::format("integrate: times not increasing at index {}", i));
  }
  std::vector<State> trajectory;
  trajectory.reserve(times.size());
  trajectory.push_back(z0);
  std::size_t step = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double h = (times[i] - times[i - 1]) / static_cast<double>(substeps);
    State z = trajectory.back();
    for (std::size_t s = 0; s < substeps; ++s) z = rk4_step(f, z, h, step++);
    trajectory.push_back(std::move(z));
  }
  return trajectory;
}

struct OdeFuncWeights {
  ad::Var w1, b1;  // 2D -> hidden
  ad::Var w2, b2;  // hidden -> D
};

/// dz = tanh([z || z_G] W1 + b1) W2 + b2. No time argument: the field is
/// autonomous.
ad::Var ode_func(ad::Var z, ad::Var z_graph, const OdeFuncWeights& w);

struct DecoderWeights {
  bool hidden = false;
  ad::Var w_hidden, b_hidden;  // only when hidden
  ad::Var w_out, b_out;
};

/// y = z w + b, or tanh(z W1 + b1) w + b with the hidden layer enabled.
ad::Var decode(ad::Var z, const DecoderWeights& w);

struct OdeConfig {
  std::size_t latent_dim = 16;
  std::size_t hidden_width = 16;
  bool decoder_hidden = false;
  std::size_t decoder_width = 16;
};

struct OdeLayout {
  std::size_t w1, b1, w2, b2;
  bool decoder_hidden = false;
  std::size_t dec_w_hidden = 0, dec_b_hidden = 0, dec_w_out = 0, dec_b_out = 0;

  OdeFuncWeights bind_field(std::span<const ad::Var> bound) const;
  DecoderWeights bind_decoder(std::span<const ad::Var> bound) const;
};

OdeLayout add_latent_ode(ad::ParamStore& store, const OdeConfig& config, Rng& rng);

}  // namespace lcgode::ode
