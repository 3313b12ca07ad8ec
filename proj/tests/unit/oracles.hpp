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

// Straight-line reference implementations used as test oracles. They use
// nested std::vector arithmetic only and share no code with the library.

#include <array>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "lcgode/autodiff/matrix.hpp"

namespace oracle {

using Mat = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

inline Mat from(const lcgode::Matrix& m) {
  Mat out(m.rows(), Vec(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  return out;
}

inline Vec row(const lcgode::Matrix& m, std::size_t r = 0) { return from(m)[r]; }

inline Mat zeros(std::size_t r, std::size_t c) { return Mat(r, Vec(c, 0.0)); }

inline Mat matmul(const Mat& a, const Mat& b) {
  Mat out = zeros(a.size(), b.empty() ? 0 : b[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

/// Row vector times matrix.
inline Vec vecmat(const Vec& v, const Mat& w) {
  Vec out(w.empty() ? 0 : w[0].size(), 0.0);
  for (std::size_t k = 0; k < v.size(); ++k)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += v[k] * w[k][j];
  return out;
}

inline Vec add(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double softplus(double x) { return std::log1p(std::exp(x)); }

inline Vec concat(const Vec& a, const Vec& b) {
  Vec out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

struct Gru {
  Mat w_in; Vec b_in;
  Mat w_u, u_u; Vec b_u;
  Mat w_r, u_r; Vec b_r;
  Mat w_c, u_c; Vec b_c;
  Mat w_mu; Vec b_mu;
  Mat w_s; Vec b_s;
};

inline Vec gru_step(const Vec& h, const Vec& x, const Gru& g) {
  const Vec au = add(add(vecmat(x, g.w_u), vecmat(h, g.u_u)), g.b_u);
  const Vec ar = add(add(vecmat(x, g.w_r), vecmat(h, g.u_r)), g.b_r);
  Vec rh(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) rh[j] = sigmoid(ar[j]) * h[j];
  const Vec ac = add(add(vecmat(x, g.w_c), vecmat(rh, g.u_c)), g.b_c);
  Vec out(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) {
    const double u = sigmoid(au[j]);
    out[j] = (1.0 - u) * h[j] + u * std::tanh(ac[j]);
  }
  return out;
}

/// Returns {mu, sigma}.
inline std::pair<Vec, Vec> encode(const Vec& y, const Vec& t, const Gru& g) {
  Vec h(g.u_u.size(), 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const Vec x = add(vecmat({y[i], t[i]}, g.w_in), g.b_in);
    h = gru_step(h, x, g);
  }
  Vec mu = add(vecmat(h, g.w_mu), g.b_mu);
  Vec pre = add(vecmat(h, g.w_s), g.b_s);
  Vec sigma(pre.size());
  for (std::size_t j = 0; j < pre.size(); ++j) sigma[j] = softplus(pre[j]) + 1e-4;
  return {mu, sigma};
}

struct Field {
  Mat w1; Vec b1;
  Mat w2; Vec b2;
};

inline Vec field(const Vec& z, const Vec& zg, const Field& f) {
  Vec hidden = add(vecmat(concat(z, zg), f.w1), f.b1);
  for (double& v : hidden) v = std::tanh(v);
  return add(vecmat(hidden, f.w2), f.b2);
}

template <class F>
Vec rk4(const F& f, const Vec& z, double h) {
  auto axpy = [](const Vec& a, double s, const Vec& b) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
    return out;
  };
  const Vec k1 = f(z);
  const Vec k2 = f(axpy(z, h / 2, k1));
  const Vec k3 = f(axpy(z, h / 2, k2));
  const Vec k4 = f(axpy(z, h, k3));
  Vec out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

/// Dense GCN encoder: directed D^-1/2 (A + I) D^-1/2 with row-sum degrees.
struct GraphSpec {
  std::size_t n = 0;
  std::vector<std::array<std::size_t, 3>> edges;  // src, dst, label
};

inline Mat node_features(const GraphSpec& g) {
  Mat x = zeros(g.n, 2);
  double count = 0;
  for (const auto& e : g.edges) count += e[2] != 0;
  if (count == 0) return x;
  for (const auto& e : g.edges) {
    if (e[2] == 0) continue;
    x[e[1]][0] += 1.0 / count;
    x[e[0]][1] += 1.0 / count;
  }
  return x;
}

inline Mat adjacency(const GraphSpec& g, const Vec& label_weights) {
  Mat a = zeros(g.n, g.n);
  for (std::size_t i = 0; i < g.n; ++i) a[i][i] = 1.0;
  for (const auto& e : g.edges) {
    if (e[2] != 0) a[e[0]][e[1]] += label_weights[e[2]];
  }
  Vec d(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j) d[i] += a[i][j];
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j) a[i][j] /= std::sqrt(d[i]) * std::sqrt(d[j]);
  return a;
}

inline Mat gcn_nodes(const GraphSpec& g, const std::vector<Mat>& weights, const Vec& label_weights) {
  const Mat a = adjacency(g, label_weights);
  Mat z = node_features(g);
  for (std::size_t l = 0; l < weights.size(); ++l) {
    z = matmul(a, matmul(z, weights[l]));
    if (l + 1 < weights.size())
      for (auto& r : z)
        for (double& v : r) v = std::max(v, 0.0);
  }
  return z;
}

inline Vec mean_pool(const Mat& z) {
  Vec out(z[0].size(), 0.0);
  for (const auto& r : z)
    for (std::size_t j = 0; j < r.size(); ++j) out[j] += r[j] / static_cast<double>(z.size());
  return out;
}

inline lcgode::Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, double lo = -1.0,
                                    double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  lcgode::Matrix m(r, c);
  for (double& v : m.values()) v = dist(rng);
  return m;
}

}  // namespace oracle
