// src/gmm.cc

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

#include "spoofkit/gmm.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "spoofkit/binary-io.h"
#include "spoofkit/parallel.h"
#include "spoofkit/random.h"

namespace spoofkit {

namespace {

constexpr double kMinVariance = 1e-10;
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// Row-wise log-sum-exp.
Vector LogSumExpRows(const Matrix &m) {
  Vector out(m.rows());
  for (Eigen::Index t = 0; t < m.rows(); ++t) {
    const double mx = m.row(t).maxCoeff();
    if (!std::isfinite(mx)) {
      out(t) = mx;
      continue;
    }
    out(t) = mx + std::log((m.row(t).array() - mx).exp().sum());
  }
  return out;
}

}  // namespace

Matrix ExpPosteriors(const Matrix &log_post) {
  return (log_post.array() < -600.0).select(0.0, log_post.array().exp()).matrix();
}

void DiagGmm::Validate() const {
  const int k = num_components();
  if (k < 1) throw Error("GMM has no components");
  if (means.rows() != k || variances.rows() != k || variances.cols() != means.cols())
    throw Error("GMM parameter shapes are inconsistent");
  if (!weights.allFinite() || !means.allFinite() || !variances.allFinite())
    throw Error("GMM has non-finite parameters");
  if ((weights.array() < 0.0).any()) throw Error("GMM has negative weights");
  if (std::abs(weights.sum() - 1.0) > 1e-10) throw Error("GMM weights do not sum to 1");
  if ((variances.array() <= 0.0).any()) throw Error("GMM has non-positive variances");
}

Matrix DiagGmm::ComponentLogLikelihoods(const Matrix &frames) const {
  if (frames.cols() != dim())
    throw Error("frames have " + std::to_string(frames.cols()) + " dims, model has " +
                std::to_string(dim()));
  const Matrix inv_var = variances.cwiseInverse();
  const Matrix mean_inv_var = means.cwiseProduct(inv_var);
  Vector gconst(num_components());
  for (int k = 0; k < num_components(); ++k) {
    gconst(k) = std::log(weights(k)) -
                0.5 * (dim() * kLog2Pi + variances.row(k).array().log().sum() +
                       means.row(k).dot(mean_inv_var.row(k)));
  }
  Matrix ll = frames * mean_inv_var.transpose();
  ll.noalias() -= 0.5 * (frames.array().square().matrix() * inv_var.transpose());
  ll.rowwise() += gconst.transpose();
  return ll;
}

Vector DiagGmm::FrameLogLikelihoods(const Matrix &frames) const {
  return LogSumExpRows(ComponentLogLikelihoods(frames));
}

void EmConfig::Validate() const {
  if (max_iters < 1) throw Error("EM max_iters must be >= 1");
  if (!(rel_tol > 0)) throw Error("EM rel_tol must be positive");
  if (!(variance_floor > 0)) throw Error("variance_floor must be positive");
  if (block_size < 1) throw Error("EM block_size must be >= 1");
}

KeyValueList EmConfig::ToKeyValues() const {
  return {{"max_iters", std::to_string(max_iters)},
          {"rel_tol", FormatDouble(rel_tol)},
          {"variance_floor", FormatDouble(variance_floor)},
          {"seed", std::to_string(seed)},
          {"block_size", std::to_string(block_size)}};
}

EmConfig EmConfig::FromSection(const ConfigSection &s) {
  EmConfig c;
  c.max_iters = s.Int("max_iters", c.max_iters);
  c.rel_tol = s.Double("rel_tol", c.rel_tol);
  c.variance_floor = s.Double("variance_floor", c.variance_floor);
  c.seed = s.Seed("seed");
  c.block_size = s.Int("block_size", c.block_size);
  c.Validate();
  return c;
}

Vector VarianceFloor(const Matrix &frames, double relative) {
  if (frames.rows() == 0) throw Error("variance floor of an empty frame set");
  const Vector mean = frames.colwise().mean().transpose();
  const Vector var =
      (frames.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
  return (relative * var).cwiseMax(kMinVariance);
}

DiagGmm KMeansInit(const Matrix &frames, int num_components, uint64_t seed,
                   double variance_floor, int max_lloyd_iters) {
  const Eigen::Index n = frames.rows();
  const int k = num_components;
  if (k < 1) throw Error("k-means needs at least one component");
  if (n < k)
    throw Error("k-means needs at least as many frames (" + std::to_string(n) +
                ") as components (" + std::to_string(k) + ")");
  const Vector floor = VarianceFloor(frames, variance_floor);
  Rng rng(seed);

  // k-means++ seeding.
  Matrix centers(k, frames.cols());
  centers.row(0) = frames.row(static_cast<Eigen::Index>(rng.Below(n)));
  Vector dist2 = (frames.rowwise() - centers.row(0)).rowwise().squaredNorm();
  bool degenerate = false;
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    if (!(total > 0.0)) {
      degenerate = true;
      for (int r = c; r < k; ++r) centers.row(r) = centers.row(0);
      break;
    }
    double target = rng.Uniform() * total;
    Eigen::Index pick = n - 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      target -= dist2(i);
      if (target < 0.0 && dist2(i) > 0.0) {
        pick = i;
        break;
      }
    }
    while (dist2(pick) == 0.0 && pick > 0) --pick;
    centers.row(c) = frames.row(pick);
    dist2 = dist2.cwiseMin((frames.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  if (degenerate)
    Warn("k-means: data has fewer distinct points than components; "
         "returning a single effective cluster");

  // Lloyd iterations.
  std::vector<int> assign(n, -1);
  const Vector frame_norms = frames.rowwise().squaredNorm();
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_lloyd_iters; ++it) {
    Matrix d = -2.0 * frames * centers.transpose();
    d.colwise() += frame_norms;
    d.rowwise() += centers.rowwise().squaredNorm().transpose();
    bool changed = false;
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best;
      inertia += std::max(0.0, d.row(i).minCoeff(&best));
      if (assign[i] != best) {
        assign[i] = static_cast<int>(best);
        changed = true;
      }
    }
    Matrix sums = Matrix::Zero(k, frames.cols());
    Vector counts = Vector::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[i]) += frames.row(i);
      counts(assign[i]) += 1.0;
    }
    for (int c = 0; c < k; ++c)
      if (counts(c) > 0) centers.row(c) = sums.row(c) / counts(c);
    if (!changed) break;
    if (prev_inertia < std::numeric_limits<double>::infinity() &&
        prev_inertia - inertia <= 1e-6 * prev_inertia)
      break;
    prev_inertia = inertia;
  }

  DiagGmm gmm;
  gmm.weights = Vector::Zero(k);
  gmm.means = centers;
  gmm.variances = Matrix::Zero(k, frames.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    gmm.weights(assign[i]) += 1.0;
    gmm.variances.row(assign[i]) += (frames.row(i) - centers.row(assign[i])).array().square().matrix();
  }
  for (int c = 0; c < k; ++c) {
    if (gmm.weights(c) > 0) gmm.variances.row(c) /= gmm.weights(c);
    gmm.variances.row(c) = gmm.variances.row(c).cwiseMax(floor.transpose());
  }
  gmm.weights /= static_cast<double>(n);
  return gmm;
}

namespace {

struct EmAccumulator {
  double loglik = 0.0;
  Vector occupancy;
  Matrix first;
  Matrix second;
};

EmAccumulator EStep(const Matrix &frames, const DiagGmm &model, const EmConfig &cfg) {
  const Eigen::Index n = frames.rows();
  const size_t blocks = static_cast<size_t>((n + cfg.block_size - 1) / cfg.block_size);
  std::vector<EmAccumulator> partial(blocks);
  ParallelFor(blocks, cfg.jobs, [&](size_t b) {
    const Eigen::Index start = static_cast<Eigen::Index>(b) * cfg.block_size;
    const Eigen::Index len = std::min<Eigen::Index>(cfg.block_size, n - start);
    const auto x = frames.middleRows(start, len);
    Matrix post = model.ComponentLogLikelihoods(x);
    const Vector lse = LogSumExpRows(post);
    post.colwise() -= lse;
    post = ExpPosteriors(post);
    EmAccumulator &acc = partial[b];
    acc.loglik = lse.sum();
    acc.occupancy = post.colwise().sum().transpose();
    acc.first = post.transpose() * x;
    acc.second = post.transpose() * x.array().square().matrix();
  });
  EmAccumulator total = std::move(partial[0]);
  for (size_t b = 1; b < blocks; ++b) {
    total.loglik += partial[b].loglik;
    total.occupancy += partial[b].occupancy;
    total.first += partial[b].first;
    total.second += partial[b].second;
  }
  if (!std::isfinite(total.loglik))
    throw Error("EM produced a non-finite log-likelihood (check features and variance floor)");
  return total;
}

void MStep(const EmAccumulator &acc, double num_frames, const Vector &floor, DiagGmm *model) {
  const int k = model->num_components();
  for (int c = 0; c < k; ++c) {
    const double occ = acc.occupancy(c);
    model->weights(c) = occ / num_frames;
    if (occ <= 1e-10 * num_frames) continue;  // keep parameters of starved components
    model->means.row(c) = acc.first.row(c) / occ;
    const auto ex2 = acc.second.row(c).array() / occ;
    model->variances.row(c) =
        (ex2 - model->means.row(c).array().square()).matrix().cwiseMax(floor.transpose());
  }
  model->weights /= model->weights.sum();
}

}  // namespace

EmResult EmFit(const Matrix &frames, const DiagGmm &init, const EmConfig &cfg,
               const EmObserver &observer) {
  cfg.Validate();
  init.Validate();
  if (frames.rows() == 0) throw Error("EM on an empty frame set");
  if (frames.cols() != init.dim())
    throw Error("frames have " + std::to_string(frames.cols()) + " dims, model has " +
                std::to_string(init.dim()));
  const double n = static_cast<double>(frames.rows());
  const Vector floor = VarianceFloor(frames, cfg.variance_floor);

  EmResult result;
  result.model = init;
  for (int c = 0; c < init.num_components(); ++c)
    result.model.variances.row(c) = result.model.variances.row(c).cwiseMax(floor.transpose());

  EmAccumulator acc = EStep(frames, result.model, cfg);
  double prev = acc.loglik / n;
  result.trace.push_back(prev);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    MStep(acc, n, floor, &result.model);
    result.iterations = it;
    if (observer) observer(it, result.model);
    acc = EStep(frames, result.model, cfg);
    const double cur = acc.loglik / n;
    result.trace.push_back(cur);
    if (cur - prev < cfg.rel_tol * std::abs(prev)) {
      result.converged = true;
      break;
    }
    prev = cur;
  }
  return result;
}

EmResult TrainGmm(const Matrix &frames, int num_components, const EmConfig &cfg) {
  cfg.Validate();
  const DiagGmm init = KMeansInit(frames, num_components, cfg.seed, cfg.variance_floor);
  return EmFit(frames, init, cfg);
}

double AvgLogLikelihood(const DiagGmm &model, const FeatureMatrix &features) {
  if (features.frames() == 0) throw Error("log-likelihood of an empty feature matrix");
  if (!model.feature_kind.empty() && !features.kind.empty() && model.feature_kind != features.kind)
    throw Error("model trained on '" + model.feature_kind + "' features cannot score '" +
                features.kind + "' features");
  return model.FrameLogLikelihoods(features.data).mean();
}

double LlrScore(const DiagGmm &bonafide, const DiagGmm &spoof, const FeatureMatrix &features) {
  return AvgLogLikelihood(bonafide, features) - AvgLogLikelihood(spoof, features);
}

Matrix PoolFrames(const std::vector<FeatureMatrix> &features) {
  Eigen::Index rows = 0;
  Eigen::Index dims = features.empty() ? 0 : features.front().dims();
  for (const auto &f : features) {
    if (f.dims() != dims) throw Error("cannot pool features of different dimensions");
    rows += f.frames();
  }
  Matrix out(rows, dims);
  Eigen::Index r = 0;
  for (const auto &f : features) {
    out.middleRows(r, f.frames()) = f.data;
    r += f.frames();
  }
  return out;
}

namespace {
constexpr char kGmmMagic[9] = "SKGMM001";
constexpr uint32_t kGmmVersion = 1;
}  // namespace

void WriteGmm(const std::string &path, const DiagGmm &model) {
  model.Validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path + " for writing");
  BinaryWriter w(&os);
  w.Header(kGmmMagic, kGmmVersion, model.feature_kind);
  w.U64(static_cast<uint64_t>(model.num_components()));
  w.U64(static_cast<uint64_t>(model.dim()));
  for (int k = 0; k < model.num_components(); ++k) w.F64(model.weights(k));
  for (int k = 0; k < model.num_components(); ++k)
    for (int d = 0; d < model.dim(); ++d) w.F64(model.means(k, d));
  for (int k = 0; k < model.num_components(); ++k)
    for (int d = 0; d < model.dim(); ++d) w.F64(model.variances(k, d));
}

DiagGmm ReadGmm(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open GMM file " + path);
  try {
    BinaryReader r(&is);
    DiagGmm model;
    model.feature_kind = r.Header(kGmmMagic, kGmmVersion);
    const uint64_t k = r.U64(), d = r.U64();
    if (k == 0 || k > (1u << 20) || d == 0 || d > (1u << 20)) throw Error("implausible GMM shape");
    model.weights.resize(static_cast<Eigen::Index>(k));
    model.means.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
    model.variances.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
    for (uint64_t i = 0; i < k; ++i) model.weights(i) = r.F64();
    for (uint64_t i = 0; i < k; ++i)
      for (uint64_t j = 0; j < d; ++j) model.means(i, j) = r.F64();
    for (uint64_t i = 0; i < k; ++i)
      for (uint64_t j = 0; j < d; ++j) model.variances(i, j) = r.F64();
    model.Validate();
    return model;
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace spoofkit
