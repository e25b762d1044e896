// src/svm.cc

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

#include "spoofkit/svm.h"

#include <cmath>
#include <fstream>
#include <numeric>

#include "spoofkit/binary-io.h"
#include "spoofkit/random.h"

namespace spoofkit {

namespace {

constexpr char kSvmMagic[9] = "SKSVM001";
constexpr uint32_t kSvmVersion = 1;

}  // namespace

void SvmModel::Validate() const {
  if (w.size() == 0) throw Error("SVM has no weights");
  if (norm_mean.size() != w.size() || norm_std.size() != w.size()) throw Error("SVM normalizer size mismatch");
  if (!w.allFinite() || !std::isfinite(b) || !norm_mean.allFinite() || !norm_std.allFinite())
    throw Error("SVM is not finite");
  if ((norm_std.array() <= 0).any()) throw Error("SVM normalizer has non-positive scale");
}

Vector SvmModel::Normalize(const Vector &x) const {
  if (x.size() != w.size())
    throw Error("SVM expects " + std::to_string(w.size()) + " dims, got " + std::to_string(x.size()));
  return (x - norm_mean).cwiseQuotient(norm_std);
}

void SvmConfig::Validate() const {
  if (!(c > 0.0)) throw Error("SVM C must be positive");
  if (max_epochs < 1) throw Error("SVM max_epochs must be >= 1");
  if (!(tol >= 0.0)) throw Error("SVM tol must be >= 0");
}

KeyValueList SvmConfig::ToKeyValues() const {
  return {{"c", FormatDouble(c)},
          {"max_epochs", std::to_string(max_epochs)},
          {"tol", FormatDouble(tol)},
          {"seed", std::to_string(seed)}};
}

SvmConfig SvmConfig::FromSection(const ConfigSection &s) {
  SvmConfig c;
  c.c = s.Double("c", c.c);
  c.max_epochs = s.Int("max_epochs", c.max_epochs);
  c.tol = s.Double("tol", c.tol);
  c.seed = s.Seed("seed");
  c.Validate();
  return c;
}

double SvmObjective(const Matrix &x, const std::vector<int> &y, const Vector &w, double b, double c) {
  const Vector margins = x * w + Vector::Constant(x.rows(), b);
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) hinge += std::max(0.0, 1.0 - y[i] * margins(i));
  return 0.5 * (w.squaredNorm() + b * b) + c * hinge;
}

SvmTrainResult TrainLinearSvm(const Matrix &x, const std::vector<int> &y, const SvmConfig &cfg) {
  cfg.Validate();
  const Eigen::Index n = x.rows(), d = x.cols();
  if (n == 0 || d == 0) throw Error("SVM training data is empty");
  if (static_cast<size_t>(n) != y.size()) throw Error("SVM label count mismatch");
  if (!x.allFinite()) throw Error("SVM training data is not finite");
  bool pos = false, neg = false;
  for (int l : y) {
    if (l != 1 && l != -1) throw Error("SVM labels must be +1 or -1");
    (l > 0 ? pos : neg) = true;
  }
  if (!pos || !neg) throw Error("SVM training needs both classes");

  SvmTrainResult result;
  SvmModel &m = result.model;
  m.norm_mean = x.colwise().mean().transpose();
  m.norm_std.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double sd = std::sqrt((x.col(j).array() - m.norm_mean(j)).square().mean());
    m.norm_std(j) = std::max(sd, kStdFloor);
  }
  Matrix z = x;
  for (Eigen::Index i = 0; i < n; ++i) z.row(i) = (x.row(i) - m.norm_mean.transpose()).cwiseQuotient(m.norm_std.transpose());

  // Augmented rows [z_i, 1]; w and b are updated together.
  Vector q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = z.row(i).squaredNorm() + 1.0;
  Vector alpha = Vector::Zero(n);
  Vector w = Vector::Zero(d);
  double b = 0.0;
  Vector best_w = w;
  double best_b = b;
  double best = SvmObjective(z, y, w, b, cfg.c);
  result.epoch_objective.push_back(best);
  result.best_objective.push_back(best);

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.seed);
  int epoch = 0;
  for (; epoch < cfg.max_epochs; ++epoch) {
    rng.Shuffle(&order);
    double max_pg = 0.0;
    for (Eigen::Index i : order) {
      const double g = y[i] * (z.row(i).dot(w) + b) - 1.0;
      double pg = g;
      if (alpha(i) == 0.0) pg = std::min(g, 0.0);
      else if (alpha(i) == cfg.c) pg = std::max(g, 0.0);
      max_pg = std::max(max_pg, std::abs(pg));
      if (pg == 0.0) continue;
      const double old = alpha(i);
      alpha(i) = std::clamp(old - g / q(i), 0.0, cfg.c);
      const double delta = (alpha(i) - old) * y[i];
      w.noalias() += delta * z.row(i).transpose();
      b += delta;
    }
    const double obj = SvmObjective(z, y, w, b, cfg.c);
    result.epoch_objective.push_back(obj);
    if (obj < best) {
      best = obj;
      best_w = w;
      best_b = b;
    }
    result.best_objective.push_back(best);
    if (max_pg <= cfg.tol) {
      ++epoch;
      break;
    }
  }
  m.w = best_w;
  m.b = best_b;
  result.epochs = epoch;
  return result;
}

double SvmScore(const SvmModel &model, const Vector &x) { return model.w.dot(model.Normalize(x)) + model.b; }

void WriteSvm(const std::string &path, const SvmModel &model, const std::string &tag) {
  model.Validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path + " for writing");
  BinaryWriter w(&os);
  w.Header(kSvmMagic, kSvmVersion, tag);
  w.F64Vector(model.w);
  w.F64(model.b);
  w.F64Vector(model.norm_mean);
  w.F64Vector(model.norm_std);
}

SvmModel ReadSvm(const std::string &path, std::string *tag) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open SVM model " + path);
  try {
    BinaryReader r(&is);
    SvmModel m;
    const std::string t = r.Header(kSvmMagic, kSvmVersion);
    if (tag) *tag = t;
    m.w = r.F64Vector();
    m.b = r.F64();
    m.norm_mean = r.F64Vector();
    m.norm_std = r.F64Vector();
    m.Validate();
    return m;
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace spoofkit
