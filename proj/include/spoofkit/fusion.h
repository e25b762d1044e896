// include/spoofkit/fusion.h

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

#ifndef SPOOFKIT_FUSION_H_
#define SPOOFKIT_FUSION_H_

#include <map>
#include <string>
#include <vector>

#include "spoofkit/base.h"
#include "spoofkit/config-section.h"

namespace spoofkit {

/// Linear fusion s = alphas . x + beta over the score columns named by
/// input_ids, in that order.
struct FusionModel {
  std::vector<std::string> input_ids;
  Vector alphas;
  double beta = 0.0;

  void Validate() const;
};

struct FusionConfig {
  double prior = 0.5;  // effective target prior
  int max_iters = 2000;
  // Stops when the gradient norm (in standardized coordinates) drops below this.
  double grad_tol = 1e-10;

  void Validate() const;
  KeyValueList ToKeyValues() const;
  static FusionConfig FromSection(const ConfigSection &section);
};

/// Prior-weighted logistic loss of s = X a + b, with labels 1 for bonafide:
///   pi/Nb sum_bona log(1 + e^-(s + logit pi))
///     + (1 - pi)/Ns sum_spoof log(1 + e^(s + logit pi)).
/// params = [a; b].  If grad is non-null it receives dL/dparams.
double FusionLoss(const Matrix &scores, const std::vector<int> &labels, double prior,
                  const Vector &params, Vector *grad = nullptr);

struct FusionTrainResult {
  FusionModel model;
  double initial_loss = 0.0;  // at a = 0, b = 0
  double final_loss = 0.0;
  int iterations = 0;
};

/// Gradient descent with backtracking line search from zero, run on
/// standardized columns and mapped back afterwards.
FusionTrainResult TrainFusion(const Matrix &scores, const std::vector<int> &labels,
                              const std::vector<std::string> &input_ids, const FusionConfig &cfg);

double ApplyFusion(const FusionModel &model, const Vector &row);

// Reorders a row given under `ids` into the model's input order.
Vector AlignRow(const FusionModel &model, const std::vector<std::string> &ids, const Vector &row);

// Text format: one "id alpha" line per input, then "beta value".
void WriteFusionModel(const std::string &path, const FusionModel &model);
FusionModel ReadFusionModel(const std::string &path);

/// Ensemble presets: model ids per ensemble name, for "LA" and "PA".
const std::map<std::string, std::vector<std::string>> &EnsemblePresets(const std::string &task);

}  // namespace spoofkit

#endif  // SPOOFKIT_FUSION_H_
