// include/spoofkit/gmm.h

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

#ifndef SPOOFKIT_GMM_H_
#define SPOOFKIT_GMM_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spoofkit/base.h"
#include "spoofkit/config-section.h"
#include "spoofkit/features.h"

namespace spoofkit {

/// Diagonal-covariance Gaussian mixture.  feature_kind records what the model
/// was trained on so that scoring can refuse mismatched features.
struct DiagGmm {
  Vector weights;     // K, on the simplex
  Matrix means;       // K x D
  Matrix variances;   // K x D, positive
  std::string feature_kind;

  int num_components() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(means.cols()); }

  void Validate() const;

  // frames x K matrix of log(w_k) + log N(x_t; mu_k, var_k).
  Matrix ComponentLogLikelihoods(const Matrix &frames) const;
  // log sum_k w_k N(x_t; mu_k, var_k) per frame.
  Vector FrameLogLikelihoods(const Matrix &frames) const;
};

struct EmConfig {
  int max_iters = 50;
  double rel_tol = 1e-5;
  // Per-dimension variance floor, as a fraction of the data's global variance.
  double variance_floor = 1e-3;
  uint64_t seed = 0;
  int jobs = 1;
  // Frames per E-step block; accumulators are reduced in block order.
  int block_size = 4096;

  void Validate() const;
  KeyValueList ToKeyValues() const;
  static EmConfig FromSection(const ConfigSection &section);
};

struct EmResult {
  DiagGmm model;
  // Average per-frame log-likelihood of the initial model followed by the
  // value after every EM update.
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

// floor_d = max(relative * var_d(frames), 1e-10).
Vector VarianceFloor(const Matrix &frames, double relative);

// k-means++ seeding followed by Lloyd iterations; weights are the cluster
// proportions and variances the floored within-cluster variances.
DiagGmm KMeansInit(const Matrix &frames, int num_components, uint64_t seed,
                   double variance_floor = 1e-3, int max_lloyd_iters = 25);

// Called after every EM update with the iteration number and current model.
using EmObserver = std::function<void(int, const DiagGmm &)>;

EmResult EmFit(const Matrix &frames, const DiagGmm &init, const EmConfig &cfg,
               const EmObserver &observer = nullptr);

// KMeansInit with cfg.seed followed by EmFit.
EmResult TrainGmm(const Matrix &frames, int num_components, const EmConfig &cfg);

double AvgLogLikelihood(const DiagGmm &model, const FeatureMatrix &features);

// Average log-likelihood ratio; positive favours bonafide.
double LlrScore(const DiagGmm &bonafide, const DiagGmm &spoof, const FeatureMatrix &features);

// exp() of a log-posterior matrix.  Entries below exp(-600) become exactly
// zero: denormal posteriors slow the accumulation products down by an order
// of magnitude and carry no weight.
Matrix ExpPosteriors(const Matrix &log_post);

// Stacks all frames of all matrices, in order.
Matrix PoolFrames(const std::vector<FeatureMatrix> &features);

// Binary model container: "SKGMM001" | version | feature kind | K | D |
// weights | means | variances (float64).
void WriteGmm(const std::string &path, const DiagGmm &model);
DiagGmm ReadGmm(const std::string &path);

}  // namespace spoofkit

#endif  // SPOOFKIT_GMM_H_
