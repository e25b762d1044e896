// src/fusion.cc

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

#include "spoofkit/fusion.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spoofkit/protocol.h"

namespace spoofkit {

namespace {

// log(1 + e^x) without overflow.
double Softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void CheckInputs(const Matrix &scores, const std::vector<int> &labels) {
  if (scores.rows() == 0 || scores.cols() == 0) throw Error("fusion: empty score matrix");
  if (static_cast<size_t>(scores.rows()) != labels.size()) throw Error("fusion: label count mismatch");
  if (!scores.allFinite()) throw Error("fusion: scores contain NaN or Inf");
  bool bona = false, spoof = false;
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error("fusion: labels must be 0 or 1");
    (l ? bona : spoof) = true;
  }
  if (!bona || !spoof) throw Error("fusion: training needs both classes");
}

}  // namespace

void FusionModel::Validate() const {
  if (input_ids.empty()) throw Error("fusion model has no inputs");
  if (static_cast<size_t>(alphas.size()) != input_ids.size()) throw Error("fusion model arity mismatch");
  if (!alphas.allFinite() || !std::isfinite(beta)) throw Error("fusion model is not finite");
  if (std::set<std::string>(input_ids.begin(), input_ids.end()).size() != input_ids.size())
    throw Error("fusion model input ids must be unique");
}

void FusionConfig::Validate() const {
  if (!(prior > 0.0 && prior < 1.0)) throw Error("fusion: prior must be in (0, 1)");
  if (max_iters < 1) throw Error("fusion: max_iters must be >= 1");
  if (!(grad_tol >= 0.0)) throw Error("fusion: grad_tol must be >= 0");
}

KeyValueList FusionConfig::ToKeyValues() const {
  return {{"prior", FormatDouble(prior)},
          {"max_iters", std::to_string(max_iters)},
          {"grad_tol", FormatDouble(grad_tol)}};
}

FusionConfig FusionConfig::FromSection(const ConfigSection &s) {
  FusionConfig c;
  c.prior = s.Double("prior", c.prior);
  c.max_iters = s.Int("max_iters", c.max_iters);
  c.grad_tol = s.Double("grad_tol", c.grad_tol);
  c.Validate();
  return c;
}

double FusionLoss(const Matrix &scores, const std::vector<int> &labels, double prior,
                  const Vector &params, Vector *grad) {
  const Eigen::Index n = scores.rows(), d = scores.cols();
  if (params.size() != d + 1) throw Error("fusion: parameter size mismatch");
  double nb = 0;
  for (int l : labels) nb += l;
  const double ns = static_cast<double>(n) - nb;
  const double offset = std::log(prior / (1.0 - prior));
  const double wb = prior / nb, ws = (1.0 - prior) / ns;

  const Vector s = scores * params.head(d) + Vector::Constant(n, params(d) + offset);
  Vector ds(n);  // dL/ds_i
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[i]) {
      loss += wb * Softplus(-s(i));
      ds(i) = -wb * Sigmoid(-s(i));
    } else {
      loss += ws * Softplus(s(i));
      ds(i) = ws * Sigmoid(s(i));
    }
  }
  if (grad) {
    grad->resize(d + 1);
    grad->head(d) = scores.transpose() * ds;
    (*grad)(d) = ds.sum();
  }
  return loss;
}

FusionTrainResult TrainFusion(const Matrix &scores, const std::vector<int> &labels,
                              const std::vector<std::string> &input_ids, const FusionConfig &cfg) {
  cfg.Validate();
  CheckInputs(scores, labels);
  const Eigen::Index d = scores.cols();
  if (input_ids.size() != static_cast<size_t>(d)) throw Error("fusion: need one id per score column");

  // Standardize columns; constant columns are left centred only.
  const Vector mean = scores.colwise().mean().transpose();
  Vector scale(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double sd = std::sqrt((scores.col(j).array() - mean(j)).square().mean());
    scale(j) = sd > kStdFloor ? sd : 1.0;
  }
  Matrix z = scores;
  for (Eigen::Index j = 0; j < d; ++j) z.col(j) = (scores.col(j).array() - mean(j)) / scale(j);

  // Zero in standardized coordinates is also zero in the original ones.
  Vector p = Vector::Zero(d + 1), g;
  double loss = FusionLoss(z, labels, cfg.prior, p, &g);
  FusionTrainResult result;
  result.initial_loss = loss;
  double step = 1.0;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    const double gg = g.squaredNorm();
    if (std::sqrt(gg) <= cfg.grad_tol) break;
    // Armijo backtracking; start from a slightly larger step than last time.
    step *= 2.0;
    Vector trial, trial_grad;
    double trial_loss;
    for (;;) {
      trial = p - step * g;
      trial_loss = FusionLoss(z, labels, cfg.prior, trial, &trial_grad);
      if (trial_loss <= loss - 1e-4 * step * gg) break;
      step *= 0.5;
      if (step < 1e-20) break;
    }
    if (!(trial_loss < loss)) break;  // no further progress at double precision
    p = trial;
    g = trial_grad;
    loss = trial_loss;
  }

  FusionModel &m = result.model;
  m.input_ids = input_ids;
  m.alphas = p.head(d).cwiseQuotient(scale);
  m.beta = p(d) - m.alphas.dot(mean);
  result.final_loss = FusionLoss(scores, labels, cfg.prior, (Vector(d + 1) << m.alphas, m.beta).finished());
  result.iterations = it;
  return result;
}

double ApplyFusion(const FusionModel &model, const Vector &row) {
  if (row.size() != model.alphas.size())
    throw Error("fusion: expected " + std::to_string(model.alphas.size()) + " scores, got " +
                std::to_string(row.size()));
  return model.alphas.dot(row) + model.beta;
}

Vector AlignRow(const FusionModel &model, const std::vector<std::string> &ids, const Vector &row) {
  if (ids.size() != static_cast<size_t>(row.size())) throw Error("fusion: ids and row differ in length");
  Vector out(model.input_ids.size());
  for (size_t i = 0; i < model.input_ids.size(); ++i) {
    size_t j = 0;
    while (j < ids.size() && ids[j] != model.input_ids[i]) ++j;
    if (j == ids.size()) throw Error("fusion: missing scores for input " + model.input_ids[i]);
    out(i) = row(j);
  }
  return out;
}

void WriteFusionModel(const std::string &path, const FusionModel &model) {
  model.Validate();
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  for (size_t i = 0; i < model.input_ids.size(); ++i)
    os << model.input_ids[i] << ' ' << FormatDouble(model.alphas(i)) << '\n';
  os << "beta " << FormatDouble(model.beta) << '\n';
  if (!os) throw Error("write failed: " + path);
}

FusionModel ReadFusionModel(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  FusionModel m;
  std::vector<double> alphas;
  bool have_beta = false;
  std::string line;
  for (int lineno = 1; std::getline(is, line); ++lineno) {
    std::istringstream ss(line);
    std::string id, value, extra;
    if (!(ss >> id)) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    if (!(ss >> value) || (ss >> extra)) throw Error(where + ": expected 'id value'");
    if (have_beta) throw Error(where + ": content after beta");
    if (id == "beta") {
      m.beta = ParseDouble(value, where);
      have_beta = true;
    } else {
      m.input_ids.push_back(id);
      alphas.push_back(ParseDouble(value, where));
    }
  }
  if (!have_beta) throw Error(path + ": missing beta line");
  m.alphas = Eigen::Map<Vector>(alphas.data(), alphas.size());
  m.Validate();
  return m;
}

const std::map<std::string, std::vector<std::string>> &EnsemblePresets(const std::string &task) {
  static const std::map<std::string, std::vector<std::string>> la{
      {"E1", {"A", "C", "D", "E", "F", "G", "I"}},
      {"E2", {"A", "B", "G"}},
      {"E3", {"A", "B"}}};
  static const std::map<std::string, std::vector<std::string>> pa{
      {"E1", {"A", "B", "C", "E", "F", "G", "H", "I", "J"}},
      {"E2", {"A", "B", "C", "D", "E"}},
      {"E3", {"A", "B"}}};
  if (task == "LA") return la;
  if (task == "PA") return pa;
  throw Error("unknown task '" + task + "' (expected LA or PA)");
}

}  // namespace spoofkit
