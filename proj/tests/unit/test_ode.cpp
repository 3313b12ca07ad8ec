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

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "lcgode/autodiff/grad_check.hpp"
#include "lcgode/ode/latent_ode.hpp"
#include "oracles.hpp"

using namespace lcgode;
using namespace lcgode::ode;
using ad::Tape;
using ad::Var;

namespace {

const auto identity_field = [](const Matrix& z) { return z; };
const auto decay_field = [](const Matrix& z) { return -1.0 * z; };

std::vector<double> grid(double start, double stop, double h) {
  std::vector<double> t;
  const auto steps = static_cast<std::size_t>(std::llround((stop - start) / h));
  for (std::size_t i = 0; i <= steps; ++i) t.push_back(start + static_cast<double>(i) * h);
  return t;
}

double exp_error(double h) {
  const auto times = grid(0.0, 1.0, h);
  const auto traj = integrate(identity_field, Matrix::scalar(1.0), std::span<const double>(times));
  return std::abs(traj.back().item() - std::exp(1.0));
}

}  // namespace

TEST_CASE("ode_func examples") {
  Tape t;
  const OdeFuncWeights zero{t.constant(Matrix(4, 3)), t.constant(Matrix(1, 3)), t.constant(Matrix(3, 2)),
                            t.constant(Matrix(1, 2))};
  const Var z = t.constant(Matrix::from_rows({{0.3, -0.2}}));
  const Var zg = t.constant(Matrix::from_rows({{1.0, 0.5}}));
  CHECK(ode_func(z, zg, zero).value() == Matrix(1, 2));

  std::mt19937_64 rng(1);
  const Matrix w1 = oracle::random_matrix(4, 3, rng), b1 = oracle::random_matrix(1, 3, rng);
  const Matrix w2 = oracle::random_matrix(3, 2, rng), b2 = oracle::random_matrix(1, 2, rng);
  const OdeFuncWeights w{t.constant(w1), t.constant(b1), t.constant(w2), t.constant(b2)};
  const Matrix out = ode_func(z, zg, w).value();
  const oracle::Field f{oracle::from(w1), oracle::row(b1), oracle::from(w2), oracle::row(b2)};
  const auto expected = oracle::field(oracle::row(z.value()), oracle::row(zg.value()), f);
  for (std::size_t j = 0; j < 2; ++j) CHECK(out(0, j) == doctest::Approx(expected[j]).epsilon(1e-14));
  // Autonomous: no time argument exists, repeated evaluation is identical.
  CHECK(ode_func(z, zg, w).value() == out);
}

TEST_CASE("rk4 step examples") {
  CHECK(rk4_step([](const Matrix& z) { return Matrix(z.shape()); }, Matrix::scalar(2.5), 0.1).item() == 2.5);
  const double up = rk4_step(identity_field, Matrix::scalar(1.0), 0.1).item();
  CHECK(up == doctest::Approx(1.10517083).epsilon(1e-8));
  CHECK(std::abs(up - std::exp(0.1)) < 1e-7);
  CHECK(std::abs(rk4_step(decay_field, Matrix::scalar(1.0), 0.1).item() - 0.90483742) < 1e-7);
  CHECK_THROWS_AS(rk4_step(identity_field, Matrix::scalar(1.0), 0.0), IntegrationError);
}

TEST_CASE("integrate examples") {
  const std::vector<double> times{0.0, 0.3, 0.5, 1.1};
  const auto constant = integrate([](const Matrix& z) { return Matrix(z.shape()); }, Matrix::from_rows({{1, -2}}),
                                  std::span<const double>(times));
  REQUIRE(constant.size() == 4);
  for (const auto& z : constant) CHECK(z == Matrix::from_rows({{1, -2}}));
  CHECK(exp_error(0.1) / std::exp(1.0) < 1e-6);
  const double ratio = exp_error(0.1) / exp_error(0.05);
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 32.0);
  CHECK_THROWS_AS(integrate(identity_field, Matrix::scalar(1), std::span<const double>(std::vector<double>{0.0, 0.0})),
                  Error);
}

TEST_CASE("global error slope is four") {
  const std::vector<double> hs{0.1, 0.05, 0.025, 0.0125};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double h : hs) {
    const double x = std::log2(h), y = std::log2(exp_error(h));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(hs.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(4.0).epsilon(0.125));
}

TEST_CASE("substeps refine a step") {
  const std::vector<double> times{0.0, 1.0};
  const double coarse = integrate(identity_field, Matrix::scalar(1.0), std::span<const double>(times), 1).back().item();
  const double fine = integrate(identity_field, Matrix::scalar(1.0), std::span<const double>(times), 10).back().item();
  CHECK(std::abs(fine - std::exp(1.0)) < std::abs(coarse - std::exp(1.0)));
  CHECK(std::abs(fine - std::exp(1.0)) / std::exp(1.0) < 1e-6);
}

TEST_CASE("time shifts leave the trajectory unchanged") {
  const auto field = [](const Matrix& z) {
    Matrix out(z.shape());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::sin(z[i]) - 0.3 * z[i];
    return out;
  };
  const std::vector<double> a{0.0, 0.25, 0.5, 0.75}, b{3.0, 3.25, 3.5, 3.75};
  const auto ta = integrate(field, Matrix::from_rows({{0.4, -1.0}}), std::span<const double>(a));
  const auto tb = integrate(field, Matrix::from_rows({{0.4, -1.0}}), std::span<const double>(b));
  for (std::size_t i = 0; i < ta.size(); ++i) CHECK(max_abs_diff(ta[i], tb[i]) < 1e-15);
}

TEST_CASE("non-finite states abort with the step index") {
  const auto blowup = [](const Matrix& z) {
    Matrix out(z.shape());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::exp(z[i] * z[i]);
    return out;
  };
  const auto times = grid(0.0, 5.0, 0.5);
  try {
    integrate(blowup, Matrix::scalar(3.0), std::span<const double>(times));
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(std::string(e.what()).find("step") != std::string::npos);
    CHECK(e.step() < times.size());
  }
}

TEST_CASE("backprop through the solver matches finite differences") {
  std::mt19937_64 rng(4);
  const std::vector<Matrix> point{oracle::random_matrix(1, 2, rng), oracle::random_matrix(1, 2, rng),
                                  oracle::random_matrix(4, 3, rng), oracle::random_matrix(1, 3, rng),
                                  oracle::random_matrix(3, 2, rng), oracle::random_matrix(1, 2, rng)};
  const std::vector<double> times{0.1, 0.2, 0.3, 0.45, 0.6};
  const ad::ScalarFn fn = [&](Tape&, std::span<const Var> v) {
    const OdeFuncWeights w{v[2], v[3], v[4], v[5]};
    const Var zg = v[1];
    const auto traj = integrate([&](const Var& z) { return ode_func(z, zg, w); }, v[0], std::span<const double>(times), 2);
    Var total = ad::sum(ad::square(traj[1]));
    for (std::size_t i = 2; i < traj.size(); ++i) total = total + ad::sum(ad::square(traj[i]));
    return total;
  };
  CHECK(ad::grad_check(fn, point, 1e-6) < 1e-4);
}

TEST_CASE("tape and matrix integration agree") {
  std::mt19937_64 rng(5);
  const Matrix w1 = oracle::random_matrix(4, 3, rng), b1 = oracle::random_matrix(1, 3, rng);
  const Matrix w2 = oracle::random_matrix(3, 2, rng), b2 = oracle::random_matrix(1, 2, rng);
  const Matrix z0 = oracle::random_matrix(1, 2, rng), zg = oracle::random_matrix(1, 2, rng);
  Tape t;
  const OdeFuncWeights w{t.constant(w1), t.constant(b1), t.constant(w2), t.constant(b2)};
  const Var zgv = t.constant(zg);
  const std::vector<double> times{0.0, 0.1, 0.2, 0.3};
  const auto traj = integrate([&](const Var& z) { return ode_func(z, zgv, w); }, t.constant(z0), std::span<const double>(times));
  const oracle::Field f{oracle::from(w1), oracle::row(b1), oracle::from(w2), oracle::row(b2)};
  auto z = oracle::row(z0);
  for (std::size_t i = 1; i < times.size(); ++i) {
    z = oracle::rk4([&](const oracle::Vec& s) { return oracle::field(s, oracle::row(zg), f); }, z, 0.1);
    for (std::size_t j = 0; j < 2; ++j) CHECK(traj[i].value()(0, j) == doctest::Approx(z[j]).epsilon(1e-13));
  }
}

TEST_CASE("decode examples") {
  Tape t;
  const DecoderWeights constant{false, {}, {}, t.constant(Matrix(3, 1)), t.constant(Matrix::scalar(0.42))};
  CHECK(decode(t.constant(Matrix::from_rows({{1, 2, 3}})), constant).value().item() == 0.42);
  const DecoderWeights linear{false, {}, {}, t.constant(Matrix::from_rows({{0.5}, {-1}, {2}})),
                              t.constant(Matrix::scalar(0.1))};
  CHECK(decode(t.constant(Matrix::from_rows({{1, 2, 3}})), linear).value().item() ==
        doctest::Approx(0.5 - 2 + 6 + 0.1).epsilon(1e-15));
  const Var z = t.constant(Matrix::from_rows({{0.2, 0.3, 0.4}}));
  CHECK(decode(z, linear).value() == decode(z, linear).value());
}

TEST_CASE("layout widths") {
  ad::ParamStore store;
  Rng rng(1);
  const auto layout = add_latent_ode(store, {5, 7, true, 4}, rng);
  CHECK(store.value(layout.w1).shape() == Shape{10, 7});
  CHECK(store.value(layout.w2).shape() == Shape{7, 5});
  CHECK(store.value(layout.dec_w_hidden).shape() == Shape{5, 4});
  CHECK(store.value(layout.dec_w_out).shape() == Shape{4, 1});
}
