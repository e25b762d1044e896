// tests/gmm-test.cc

// Copyright 2026  The spoofkit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "spoofkit/gmm.h"
#include "spoofkit/random.h"

using namespace spoofkit;

namespace {

DiagGmm RandomGmm(int k, int d, Rng *rng) {
  DiagGmm g;
  g.weights.resize(k);
  for (int i = 0; i < k; ++i) g.weights(i) = rng->Uniform(0.2, 1.0);
  g.weights /= g.weights.sum();
  g.means.resize(k, d);
  g.variances.resize(k, d);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d; ++j) {
      g.means(i, j) = rng->Uniform(-3, 3);
      g.variances(i, j) = rng->Uniform(0.3, 2.0);
    }
  return g;
}

Matrix Sample(const DiagGmm &g, int n, Rng *rng) {
  Matrix x(n, g.dim());
  for (int t = 0; t < n; ++t) {
    double u = rng->Uniform();
    int k = 0;
    while (k + 1 < g.num_components() && u >= g.weights(k)) u -= g.weights(k++);
    for (int j = 0; j < g.dim(); ++j)
      x(t, j) = g.means(k, j) + std::sqrt(g.variances(k, j)) * rng->Normal();
  }
  return x;
}

FeatureMatrix Wrap(const Matrix &m) {
  FeatureMatrix f;
  f.data = m;
  f.n_static = static_cast<int>(m.cols());
  return f;
}

// log sum_k w_k prod_d N(x_d; mu, var), one frame at a time.
double DirectAvgLogLik(const DiagGmm &g, const Matrix &x) {
  double total = 0;
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    std::vector<double> terms;
    for (int k = 0; k < g.num_components(); ++k) {
      double l = std::log(g.weights(k));
      for (int j = 0; j < g.dim(); ++j) {
        const double v = g.variances(k, j), diff = x(t, j) - g.means(k, j);
        l += -0.5 * std::log(2 * std::numbers::pi * v) - 0.5 * diff * diff / v;
      }
      terms.push_back(l);
    }
    double mx = terms[0];
    for (double v : terms) mx = std::max(mx, v);
    double s = 0;
    for (double v : terms) s += std::exp(v - mx);
    total += mx + std::log(s);
  }
  return total / x.rows();
}

}  // namespace

TEST_CASE("k-means with one component gives sample moments") {
  Rng rng(1);
  Matrix x(200, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.Normal() * 2.0 + 1.0;
  const DiagGmm g = KMeansInit(x, 1, 7);
  const Vector mean = x.colwise().mean().transpose();
  const Vector var = (x.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
  CHECK((g.means.row(0).transpose() - mean).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g.variances.row(0).transpose() - var).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(g.weights(0) == 1.0);
}

TEST_CASE("k-means separates two clouds and is deterministic") {
  Rng rng(2);
  Matrix x(1000, 2);
  for (int t = 0; t < 1000; ++t) {
    const double c = t < 500 ? -10.0 : 10.0;
    x(t, 0) = c + rng.Normal();
    x(t, 1) = 0.5 * c + rng.Normal();
  }
  const Vector m1 = x.topRows(500).colwise().mean().transpose();
  const Vector m2 = x.bottomRows(500).colwise().mean().transpose();
  const DiagGmm g = KMeansInit(x, 2, 99);
  const int lo = g.means(0, 0) < g.means(1, 0) ? 0 : 1;
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(g.means(lo, j) - m1(j)) <= 0.01 * std::abs(m1(j)));
    CHECK(std::abs(g.means(1 - lo, j) - m2(j)) <= 0.01 * std::abs(m2(j)));
  }
  const DiagGmm h = KMeansInit(x, 2, 99);
  CHECK(g.means == h.means);
  CHECK(g.variances == h.variances);
  CHECK(g.weights == h.weights);
}

TEST_CASE("k-means edge cases") {
  CHECK_THROWS_AS(KMeansInit(Matrix::Zero(3, 2), 4, 1), Error);
  Matrix same = Matrix::Constant(10, 2, 3.0);
  const DiagGmm g = KMeansInit(same, 3, 1);
  g.Validate();
  CHECK(g.weights(0) == 1.0);
  CHECK((g.variances.array() > 0).all());
}

TEST_CASE("EM with one component reaches sample moments in one update") {
  Rng rng(3);
  Matrix x(300, 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.Normal() * 3.0 - 2.0;
  DiagGmm init;
  init.weights = Vector::Ones(1);
  init.means = Matrix::Constant(1, 2, 5.0);
  init.variances = Matrix::Constant(1, 2, 0.5);
  EmConfig cfg;
  cfg.max_iters = 1;
  const EmResult r = EmFit(x, init, cfg);
  const Vector mean = x.colwise().mean().transpose();
  const Vector var = (x.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
  CHECK((r.model.means.row(0).transpose() - mean).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((r.model.variances.row(0).transpose() - var).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(r.trace.size() == 2);
  CHECK(r.trace[1] >= r.trace[0]);
}

TEST_CASE("EM recovers a two-component mixture") {
  Rng rng(4);
  DiagGmm truth;
  truth.weights = Vector::Constant(2, 0.5);
  truth.means.resize(2, 1);
  truth.means << -5.0, 5.0;
  truth.variances = Matrix::Ones(2, 1);
  const Matrix x = Sample(truth, 4000, &rng);
  EmConfig cfg;
  cfg.seed = 10;
  const EmResult r = TrainGmm(x, 2, cfg);
  const int lo = r.model.means(0, 0) < r.model.means(1, 0) ? 0 : 1;
  CHECK(std::abs(r.model.means(lo, 0) + 5.0) < 0.25);
  CHECK(std::abs(r.model.means(1 - lo, 0) - 5.0) < 0.25);
  for (size_t i = 1; i < r.trace.size(); ++i)
    CHECK(r.trace[i] >= r.trace[i - 1] - 1e-8 * std::abs(r.trace[i - 1]));
}

TEST_CASE("EM started at the generating model barely moves") {
  Rng rng(5);
  const DiagGmm truth = RandomGmm(3, 2, &rng);
  const Matrix x = Sample(truth, 20000, &rng);
  EmConfig cfg;
  cfg.max_iters = 5;
  const EmResult r = EmFit(x, truth, cfg);
  for (size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i] >= r.trace[i - 1] - 1e-8 * std::abs(r.trace[i - 1]));
    CHECK(r.trace[i] - r.trace[0] < 0.01);
  }
}

TEST_CASE("EM rejects mismatched dimensions") {
  Rng rng(6);
  const DiagGmm g = RandomGmm(2, 3, &rng);
  CHECK_THROWS_AS(EmFit(Matrix::Zero(10, 2), g, EmConfig{}), Error);
}

TEST_CASE("EM is independent of the job count") {
  Rng rng(7);
  const DiagGmm truth = RandomGmm(4, 3, &rng);
  const Matrix x = Sample(truth, 5000, &rng);
  EmConfig cfg;
  cfg.seed = 3;
  cfg.block_size = 512;
  cfg.jobs = 1;
  const EmResult a = TrainGmm(x, 4, cfg);
  cfg.jobs = 4;
  const EmResult b = TrainGmm(x, 4, cfg);
  CHECK(a.model.means == b.model.means);
  CHECK(a.model.variances == b.model.variances);
  CHECK(a.trace == b.trace);
}

TEST_CASE("average log-likelihood") {
  DiagGmm unit;
  unit.weights = Vector::Ones(1);
  unit.means = Matrix::Zero(1, 1);
  unit.variances = Matrix::Ones(1, 1);
  CHECK(AvgLogLikelihood(unit, Wrap(Matrix::Zero(1, 1))) == doctest::Approx(-0.9189385332046727).epsilon(1e-14));

  Rng rng(8);
  const DiagGmm g = RandomGmm(5, 4, &rng);
  Matrix x(40, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.Normal() * 2;
  CHECK(std::abs(AvgLogLikelihood(g, Wrap(x)) - DirectAvgLogLik(g, x)) < 1e-9);

  Matrix doubled(80, 4);
  doubled << x, x;
  CHECK(AvgLogLikelihood(g, Wrap(doubled)) == doctest::Approx(AvgLogLikelihood(g, Wrap(x))).epsilon(1e-13));

  CHECK_THROWS_AS(AvgLogLikelihood(g, Wrap(Matrix::Zero(0, 4))), Error);
  CHECK_THROWS_AS(AvgLogLikelihood(g, Wrap(Matrix::Zero(3, 2))), Error);
  DiagGmm tagged = g;
  tagged.feature_kind = "mfcc";
  FeatureMatrix other = Wrap(x);
  other.kind = "cqcc";
  CHECK_THROWS_AS(AvgLogLikelihood(tagged, other), Error);
}

TEST_CASE("llr score: identical models, antisymmetry, sign, order invariance") {
  Rng rng(9);
  const DiagGmm a = RandomGmm(3, 2, &rng);
  DiagGmm b = a;
  b.means.array() += 4.0;
  const Matrix x = Sample(a, 200, &rng);
  CHECK(LlrScore(a, a, Wrap(x)) == 0.0);
  CHECK(LlrScore(a, b, Wrap(x)) == doctest::Approx(-LlrScore(b, a, Wrap(x))).epsilon(1e-14));
  CHECK(LlrScore(a, b, Wrap(x)) > 0.0);
  Matrix reversed = x.colwise().reverse();
  CHECK(LlrScore(a, b, Wrap(reversed)) == doctest::Approx(LlrScore(a, b, Wrap(x))).epsilon(1e-12));
}

TEST_CASE("gmm file round trip") {
  Rng rng(10);
  DiagGmm g = RandomGmm(3, 4, &rng);
  g.feature_kind = "lfcc";
  const auto path = (std::filesystem::temp_directory_path() / "spoofkit-gmm.bin").string();
  WriteGmm(path, g);
  const DiagGmm h = ReadGmm(path);
  CHECK(h.weights == g.weights);
  CHECK(h.means == g.means);
  CHECK(h.variances == g.variances);
  CHECK(h.feature_kind == "lfcc");
  std::filesystem::remove(path);
}
