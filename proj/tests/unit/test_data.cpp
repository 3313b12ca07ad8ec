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

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lcgode/data/dataset_io.hpp"
#include "lcgode/data/normalization.hpp"
#include "lcgode/data/synthetic.hpp"

using namespace lcgode;
using namespace lcgode::data;

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i] / n;
    mb += rb[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

Dataset generate(std::size_t trials, std::size_t epochs, std::uint64_t seed, double noise = 0.0,
                 std::size_t threads = 1) {
  SyntheticConfig c;
  c.num_trials = trials;
  c.epochs = epochs;
  c.seed = seed;
  c.noise = noise;
  c.threads = threads;
  return generate_synthetic_dataset(c);
}

}  // namespace

TEST_CASE("hyperparameter sampling stays in range and is seeded") {
  Rng rng(1);
  std::vector<double> log_lr;
  for (int i = 0; i < 10000; ++i) {
    const auto hp = sample_hyperparams(rng);
    CHECK(hp.batch_size >= 16);
    CHECK(hp.batch_size <= 512);
    CHECK(hp.learning_rate >= 1e-4);
    CHECK(hp.learning_rate <= 1e-1);
    CHECK(hp.weight_decay >= 1e-5);
    CHECK(hp.weight_decay <= 0.1);
    CHECK(hp.num_layers >= 1);
    CHECK(hp.num_layers <= 5);
    REQUIRE(hp.units_per_layer.size() == static_cast<std::size_t>(hp.num_layers));
    for (int u : hp.units_per_layer) {
      CHECK(u >= 16);
      CHECK(u <= 1024);
    }
    CHECK(hp.dropout >= 0.0);
    CHECK(hp.dropout <= 1.0);
    log_lr.push_back(std::log(hp.learning_rate));
  }
  std::nth_element(log_lr.begin(), log_lr.begin() + 5000, log_lr.end());
  const double expected = std::log(std::sqrt(1e-4 * 1e-1));
  CHECK(std::abs(log_lr[5000] - expected) <= 0.05 * std::abs(expected));

  Rng a(9), b(9);
  CHECK(sample_hyperparams(a) == sample_hyperparams(b));
  Rng c(4);
  const auto hp = sample_hyperparams(c);
  CHECK(MlpHyperparams::from_json(hp.to_json()) == hp);
}

TEST_CASE("hyperparameters to graph") {
  MlpHyperparams hp;
  hp.num_layers = 1;
  hp.units_per_layer = {2};
  const auto g = hyperparams_to_graph(hp);
  CHECK(g.num_nodes == 4);
  CHECK(g.edges.size() == 4);
  hp.units_per_layer = {1};
  const auto path = hyperparams_to_graph(hp);
  CHECK(path.num_nodes == 3);
  CHECK(path.edges == std::vector<graph::Edge>{{0, 1, 1}, {1, 2, 1}});
  hp.num_layers = 3;
  hp.units_per_layer = {5, 7, 3};
  const auto big = hyperparams_to_graph(hp, {4, 2, 1});
  CHECK(big.num_nodes == 4 + 5 + 7 + 3 + 2);
  CHECK(big.edges.size() == 4 * 5 + 5 * 7 + 7 * 3 + 3 * 2);
  for (const auto& e : big.edges) CHECK(e.label == 1);
  CHECK_NOTHROW(big.validate());
  const auto coarse = hyperparams_to_graph(hp, {4, 2, 4});
  CHECK(coarse.num_nodes == 4 + 1 + 2 + 1 + 2);
}

TEST_CASE("gradient flow curve examples") {
  const GradientFlowTask unit{{1.0}, {1.0}, 0.0};
  CHECK(unit.loss_at(0.0) == 0.5);
  CHECK(unit.loss_at(1.0) == doctest::Approx(0.067668).epsilon(1e-5));
  const auto zero = gradient_flow_curve({{2.0}, {0.0}, 0.0}, 10, 1.0);
  for (double v : zero.values) CHECK(v == 0.0);
  const auto curve = gradient_flow_curve(unit, 4, 2.0);
  CHECK(curve.values[3] == doctest::Approx(unit.loss_at(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(gradient_flow_curve({{-1.0}, {1.0}, 0.0}, 4, 1.0), DataError);
  CHECK_THROWS_AS(gradient_flow_curve({{1.0}, {1.0}, 0.1}, 4, 1.0), DataError);
}

TEST_CASE("noiseless curves satisfy dL/dt = -|grad L|^2 up to O(dt^2)") {
  const auto trials = generate(50, 200, 3);
  for (const auto& t : trials) {
    const auto task = synthetic_task(t.hyperparams, t.graph, default_rate_link, 0.0);
    const auto& values = t.curve(Metric::test_loss).values;
    const double dt = 1.0 / 200.0;
    double max_rate = 0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) max_rate = std::max(max_rate, task.grad_norm_sq((i + 1) * dt));
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
      const double central = (values[i + 1] - values[i - 1]) / (2 * dt);
      const double exact = -task.grad_norm_sq(static_cast<double>(i + 1) * dt);
      // Central-difference error bound: dt^2/6 * max|L'''|, with |L'''| <= 4 lambda_max^2 |L'|.
      double lmax = 0;
      for (double l : task.eigenvalues) lmax = std::max(lmax, l);
      CHECK(std::abs(central - exact) <= dt * dt / 6.0 * 4.0 * lmax * lmax * std::abs(exact) * 1.5 + 1e-12);
    }
  }
}

TEST_CASE("synthetic dataset properties") {
  const auto a = generate(20, 30, 5);
  const auto b = generate(20, 30, 5, 0.0, 3);
  CHECK(a == b);
  for (const auto& t : a) {
    CHECK_NOTHROW(t.curve(Metric::test_loss).validate());
    CHECK_NOTHROW(t.curve(Metric::test_accuracy).validate());
    const auto& loss = t.curve(Metric::test_loss).values;
    for (std::size_t i = 1; i < loss.size(); ++i) CHECK(loss[i] < loss[i - 1]);
    CHECK(loss.front() <= std::log(10.0));
  }
  CHECK(std::set<std::string>{a[0].trial_id, a[1].trial_id}.size() == 2);

  // Identical graphs and hyperparameters give identical noiseless curves.
  const auto t1 = synthetic_task(a[0].hyperparams, a[0].graph, default_rate_link, 0.0);
  const auto t2 = synthetic_task(a[0].hyperparams, a[0].graph, default_rate_link, 0.0);
  CHECK(gradient_flow_curve(t1, 30, 1.0) == gradient_flow_curve(t2, 30, 1.0));

  CHECK_THROWS_AS(generate(3, 30, 5), DataError);

  const auto noisy1 = generate(6, 30, 5, 0.02), noisy2 = generate(6, 30, 5, 0.02);
  CHECK(noisy1 == noisy2);
  CHECK(noisy1[0].curve(Metric::test_loss) != a[0].curve(Metric::test_loss));

  SyntheticConfig cnn;
  cnn.num_trials = 10;
  cnn.epochs = 20;
  cnn.kind = graph::GraphKind::cnn_cell;
  for (const auto& t : generate_synthetic_dataset(cnn)) {
    CHECK(t.graph.num_nodes == 4);
    CHECK(t.graph.edges.size() == 6);
    CHECK_NOTHROW(t.graph.validate());
  }
}

TEST_CASE("paper protocol shape: 550 trials of 200 epochs") {
  const auto trials = generate(550, 200, 7);
  CHECK(trials.size() == 550);
  for (const auto& t : trials) CHECK(t.curve(Metric::test_accuracy).m() == 200);
  Rng rng(1);
  const auto [train, test] = split(trials, 0.2, rng);
  CHECK(test.size() == 110);
  CHECK(train.size() == 440);
}

TEST_CASE("denser architectures train faster") {
  const auto trials = generate(300, 60, 11);
  std::vector<double> degree, final_loss;
  for (const auto& t : trials) {
    degree.push_back(mean_degree(t.graph));
    final_loss.push_back(t.curve(Metric::test_loss).values.back());
  }
  CHECK(spearman(degree, final_loss) < 0.0);
}

TEST_CASE("normalization examples") {
  const auto acc = NormalizationParams::accuracy();
  CHECK(acc.a == 2.0);
  CHECK(acc.b == -1.0);
  CHECK(acc.c == doctest::Approx(9.87978).epsilon(1e-5));
  CHECK(acc.d == doctest::Approx(-8.70209).epsilon(1e-5));
  CHECK(std::abs(normalize_value(0.0, acc)) < 1e-9);
  CHECK(std::abs(normalize_value(1.0, acc) - 1.0) < 1e-9);
  CHECK(normalize_value(0.5, acc) == doctest::Approx(0.7091).epsilon(1e-3));
  const auto flipped = NormalizationParams::make(true, 0, 1, 0, 1);
  for (double x : {0.1, 0.5, 0.9}) CHECK(normalize_value(x, flipped) == doctest::Approx(1.0 - normalize_value(x, acc)));
  CHECK_THROWS_AS(NormalizationParams::make(false, 1, 0, 0, 1), DataError);
  CHECK_THROWS_AS(NormalizationParams::make(false, 0, 1, 1, 1), DataError);
}

TEST_CASE("normalization is a monotone bijection") {
  const auto trials = generate(10, 50, 12);
  double max_first = 0;
  for (const auto& t : trials) max_first = std::max(max_first, t.curve(Metric::test_loss).values.front());
  for (const auto& p : {NormalizationParams::accuracy(), NormalizationParams::log_loss(max_first)}) {
    double prev = p.minimize ? 2.0 : -1.0;
    for (int i = 1; i < 1000; ++i) {
      const double x = p.l_hard + (p.u_hard - p.l_hard) * i / 1000.0;
      const double y = normalize_value(x, p);
      CHECK(y > 0.0);
      CHECK(y < 1.0);
      CHECK(std::abs(denormalize_value(y, p) - x) < 1e-9);
      CHECK(std::abs(normalize_value(denormalize_value(y, p), p) - y) < 1e-12);
      CHECK((p.minimize ? y < prev : y > prev));
      prev = y;
    }
  }
  const auto loss_params = NormalizationParams::log_loss(max_first);
  for (const auto& t : trials) {
    const auto& v = t.curve(Metric::test_loss).values;
    const auto back = denormalize_curve(normalize_curve(v, loss_params), loss_params);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(back[i] - v[i]) < 1e-9);
  }
}

TEST_CASE("normalization rejects out-of-range values with the index") {
  const auto acc = NormalizationParams::accuracy();
  try {
    normalize_curve(std::vector<double>{0.2, 1.5}, acc);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }
  CHECK_THROWS_AS(denormalize_curve(std::vector<double>{0.5, 1.0}, acc), DataError);
  CHECK_THROWS_AS(denormalize_curve(std::vector<double>{0.0}, acc), DataError);
}

TEST_CASE("dataset JSONL roundtrip") {
  const auto trials = generate(10, 25, 13, 0.02);
  std::stringstream buffer;
  write_dataset(buffer, trials);
  const auto loaded = read_dataset(buffer);
  CHECK(loaded.trials == trials);
  CHECK(loaded.warnings.empty());
}

TEST_CASE("dataset parse errors") {
  const std::string good =
      R"({"trial_id":"a","arch":{"kind":"mlp","num_nodes":2,"edges":[[0,1,1]]},"hyperparams":{},)"
      R"("curves":{"test_loss":{"m":2,"t_max":1.0,"values":[0.5,0.4]}}})";
  {
    std::stringstream in(good + "\n" + R"({"trial_id":"b","arch":{"kind":"mlp","num_nodes":1,"edges":[]}})" + "\n");
    try {
      read_dataset(in);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("'b'") != std::string::npos);
      CHECK(msg.find("curves") != std::string::npos);
      CHECK(msg.find("line 2") != std::string::npos);
    }
  }
  {
    std::stringstream in(good + "\n{not json\n");
    CHECK_THROWS_WITH_AS(read_dataset(in), doctest::Contains("line 2"), DataError);
  }
  {
    std::string other = good;
    other.replace(other.find("\"a\""), 3, "\"b\"");
    other.replace(other.find("\"m\":2"), 5, "\"m\":3");
    other.replace(other.find("[0.5,0.4]"), 9, "[0.5,0.4,0.3]");
    std::stringstream in(good + "\n" + other + "\n");
    CHECK_THROWS_AS(read_dataset(in), DataError);
  }
  {
    std::stringstream in(good + "\n" + good + "\n");
    CHECK_THROWS_WITH_AS(read_dataset(in), doctest::Contains("duplicate"), DataError);
  }
  {
    std::string extra = good;
    extra.insert(1, R"("notes":"x",)");
    std::stringstream in(extra + "\n");
    const auto r = read_dataset(in);
    CHECK(r.trials.size() == 1);
    CHECK(r.warnings.size() == 1);
  }
}

TEST_CASE("split is by whole trials, disjoint and seeded") {
  const auto trials = generate(37, 10, 14);
  Rng r1(5), r2(5);
  const auto [train, test] = split(trials, 0.2, r1);
  const auto [train2, test2] = split(trials, 0.2, r2);
  CHECK(train == train2);
  CHECK(test == test2);
  std::set<std::string> ids;
  for (const auto& t : train) ids.insert(t.trial_id);
  for (const auto& t : test) CHECK(ids.insert(t.trial_id).second);
  CHECK(ids.size() == trials.size());
  CHECK(test.size() == 7);
}
