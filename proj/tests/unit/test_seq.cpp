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

#include <cmath>
#include <random>

#include "lcgode/autodiff/grad_check.hpp"
#include "lcgode/seq/sequence_encoder.hpp"
#include "oracles.hpp"

using namespace lcgode;
using namespace lcgode::seq;
using ad::Tape;
using ad::Var;

namespace {

struct RandomGru {
  std::vector<Matrix> mats;  // in SeqEncoderWeights field order
  oracle::Gru oracle;
};

RandomGru random_gru(std::size_t d, std::mt19937_64& rng, double scale = 0.5) {
  const std::vector<Shape> shapes{{2, d}, {1, d}, {d, d}, {d, d}, {1, d}, {d, d}, {d, d}, {1, d},
                                  {d, d}, {d, d}, {1, d}, {d, d}, {1, d}, {d, d}, {1, d}};
  RandomGru g;
  for (const Shape& s : shapes) g.mats.push_back(oracle::random_matrix(s.rows, s.cols, rng, -scale, scale));
  auto m = [&](int i) { return oracle::from(g.mats[i]); };
  auto v = [&](int i) { return oracle::row(g.mats[i]); };
  g.oracle = {m(0), v(1), m(2), m(3), v(4), m(5), m(6), v(7), m(8), m(9), v(10), m(11), v(12), m(13), v(14)};
  return g;
}

SeqEncoderWeights bind_gru(Tape& t, const std::vector<Matrix>& m) {
  std::vector<Var> v;
  for (const auto& x : m) v.push_back(t.constant(x));
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11], v[12], v[13], v[14]};
}

std::vector<Matrix> zero_weights(std::size_t d) {
  std::mt19937_64 rng(0);
  auto g = random_gru(d, rng);
  for (auto& m : g.mats) m = Matrix(m.shape());
  return g.mats;
}

}  // namespace

TEST_CASE("gru cell with zero weights halves the state") {
  Tape t;
  const auto w = bind_gru(t, zero_weights(3));
  const Var h = t.constant(Matrix::from_rows({{1.0, -2.0, 4.0}}));
  const Var x = t.constant(Matrix::from_rows({{0.3, 0.1, -0.2}}));
  CHECK(gru_cell(h, x, w).value() == Matrix::from_rows({{0.5, -1.0, 2.0}}));
}

TEST_CASE("gru cell from zero state stays in the tanh bound") {
  std::mt19937_64 rng(2);
  auto g = random_gru(4, rng, 5.0);
  Tape t;
  const auto w = bind_gru(t, g.mats);
  const Var out = gru_cell(t.constant(Matrix(1, 4)), t.constant(oracle::random_matrix(1, 4, rng, -10, 10)), w);
  for (double v : out.value().storage()) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("gru cell matches the straight-line oracle") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    auto g = random_gru(5, rng);
    Tape t;
    const auto w = bind_gru(t, g.mats);
    const Matrix h = oracle::random_matrix(1, 5, rng), x = oracle::random_matrix(1, 5, rng);
    const Matrix out = gru_cell(t.constant(h), t.constant(x), w).value();
    const auto expected = oracle::gru_step(oracle::row(h), oracle::row(x), g.oracle);
    for (std::size_t j = 0; j < 5; ++j) CHECK(out(0, j) == doctest::Approx(expected[j]).epsilon(1e-14));
  }
}

TEST_CASE("encode with zero parameters") {
  Tape t;
  const auto w = bind_gru(t, zero_weights(4));
  const auto post = encode_observations(t, {Matrix::from_rows({{0.1, 0.2, 0.3}}), {0.1, 0.2, 0.3}}, w);
  CHECK(post.mu.value() == Matrix(1, 4));
  for (double s : post.sigma.value().storage()) CHECK(s == doctest::Approx(std::log(2.0) + 1e-4).epsilon(1e-15));
}

TEST_CASE("without recurrence the state only depends on the last input") {
  std::mt19937_64 rng(4);
  auto g = random_gru(3, rng);
  // Zero recurrent matrices and a saturated update gate: h' = candidate(x).
  for (int i : {3, 6, 9}) g.mats[i] = Matrix(3, 3);
  g.mats[2] = Matrix(3, 3);
  g.mats[4] = Matrix(1, 3, 60.0);
  Tape t;
  const auto w = bind_gru(t, g.mats);
  const auto one = encode_observations(t, {Matrix::from_rows({{0.7}}), {0.5}}, w);
  const auto repeated = encode_observations(t, {Matrix::from_rows({{0.7, 0.7}}), {0.25, 0.5}}, w);
  CHECK(max_abs_diff(one.mu.value(), repeated.mu.value()) < 1e-15);
  CHECK(max_abs_diff(one.sigma.value(), repeated.sigma.value()) < 1e-15);
}

TEST_CASE("10-step encode matches the unrolled oracle, batched rows independent") {
  std::mt19937_64 rng(5);
  auto g = random_gru(6, rng);
  const std::size_t n = 10;
  Matrix values(3, n);
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) times[i] = static_cast<double>(i + 1) / 60.0;
  std::uniform_real_distribution<double> y(0, 1);
  for (double& v : values.values()) v = y(rng);
  Tape t;
  const auto post = encode_observations(t, {values, times}, bind_gru(t, g.mats));
  for (std::size_t r = 0; r < 3; ++r) {
    const auto [mu, sigma] = oracle::encode(values.row(r), times, g.oracle);
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(post.mu.value()(r, j) == doctest::Approx(mu[j]).epsilon(1e-13));
      CHECK(post.sigma.value()(r, j) == doctest::Approx(sigma[j]).epsilon(1e-13));
    }
  }
}

TEST_CASE("encode rejects an empty or malformed prefix") {
  Tape t;
  const auto w = bind_gru(t, zero_weights(2));
  CHECK_THROWS_AS(encode_observations(t, {Matrix(1, 0), {}}, w), Error);
  CHECK_THROWS_AS(encode_observations(t, {Matrix(1, 2), {0.2, 0.1}}, w), Error);
  CHECK_THROWS_AS(encode_observations(t, {Matrix(1, 2), {0.1}}, w), ShapeError);
}

TEST_CASE("sigma never drops below the floor") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 20; ++i) {
    auto g = random_gru(4, rng, 3.0);
    g.mats[14] = Matrix(1, 4, -800.0);
    Tape t;
    const auto post = encode_observations(t, {oracle::random_matrix(2, 5, rng), {0.1, 0.2, 0.3, 0.4, 0.5}}, bind_gru(t, g.mats));
    for (double s : post.sigma.value().storage()) CHECK(s >= kSigmaFloor);
  }
}

TEST_CASE("sample_latent examples") {
  Tape t;
  const PosteriorVars p{t.constant(Matrix::from_rows({{1, 2}})), t.constant(Matrix::from_rows({{0.5, 1}}))};
  CHECK(sample_latent(p, t.constant(Matrix::from_rows({{2, -1}}))).value() == Matrix::from_rows({{2, 1}}));
  CHECK(sample_latent(p, t.constant(Matrix(1, 2))).value() == p.mu.value());
  const PosteriorVars tight{p.mu, t.constant(Matrix(1, 2, kSigmaFloor))};
  const Matrix noise = Matrix::from_rows({{3, -2}});
  const Matrix z = sample_latent(tight, t.constant(noise)).value();
  for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(z(0, j) - p.mu.value()(0, j)) <= 1e-3 * std::abs(noise(0, j)));
}

TEST_CASE("reparameterized samples reproduce mu and sigma") {
  std::mt19937_64 rng(8);
  const std::size_t count = 100000;
  Tape t;
  const Matrix mu = Matrix::from_rows({{0.7, -1.3, 2.0}});
  const Matrix sigma = Matrix::from_rows({{0.2, 1.5, 0.9}});
  Matrix noise(count, 3);
  std::normal_distribution<double> nd;
  for (double& v : noise.values()) v = nd(rng);
  const PosteriorVars p{t.constant(mu), t.constant(sigma)};
  const Matrix z = sample_latent(p, t.constant(noise)).value();
  for (std::size_t j = 0; j < 3; ++j) {
    double s = 0, sq = 0;
    for (std::size_t r = 0; r < count; ++r) {
      s += z(r, j);
      sq += z(r, j) * z(r, j);
    }
    const double mean = s / count, sd = std::sqrt(sq / count - mean * mean);
    CHECK(std::abs(mean - mu(0, j)) <= 0.02 * std::max(std::abs(mu(0, j)), sigma(0, j)));
    CHECK(std::abs(sd - sigma(0, j)) <= 0.02 * sigma(0, j));
  }
}

TEST_CASE("sample gradients are identity in mu and diag(noise) in sigma") {
  Tape t;
  const Var mu = t.variable(Matrix::from_rows({{0.3, -0.4}}));
  const Var sigma = t.variable(Matrix::from_rows({{0.5, 1.2}}));
  const Matrix noise = Matrix::from_rows({{1.5, -0.25}});
  const Var z = sample_latent({mu, sigma}, t.constant(noise));
  for (std::size_t j = 0; j < 2; ++j) {
    const auto adj = t.adjoints(ad::element(z, 0, j));
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(adj[mu.id()](0, k) == (j == k ? 1.0 : 0.0));
      CHECK(adj[sigma.id()](0, k) == (j == k ? noise(0, j) : 0.0));
    }
  }
  const ad::ScalarFn fn = [&](Tape& tape, std::span<const Var> v) {
    return ad::sum(ad::square(sample_latent({v[0], v[1]}, tape.constant(noise))));
  };
  const std::array point{mu.value(), sigma.value()};
  CHECK(ad::grad_check(fn, point, 1e-6) < 1e-8);
}

TEST_CASE("full encoder gradients pass grad_check") {
  std::mt19937_64 rng(9);
  auto g = random_gru(3, rng);
  const ObservedPrefix prefix{oracle::random_matrix(2, 4, rng), {0.1, 0.2, 0.3, 0.4}};
  const ad::ScalarFn fn = [&](Tape& t, std::span<const Var> v) {
    const SeqEncoderWeights w{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11], v[12], v[13], v[14]};
    const auto post = encode_observations(t, prefix, w);
    return ad::sum(ad::square(post.mu)) + ad::sum(ad::log(post.sigma));
  };
  CHECK(ad::grad_check(fn, g.mats, 1e-6) < 1e-6);
}
