// include/spoofkit/svm.h

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

#ifndef SPOOFKIT_SVM_H_
#define SPOOFKIT_SVM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "spoofkit/base.h"
#include "spoofkit/config-section.h"

namespace spoofkit {

/// Linear SVM over mean/variance normalized inputs.  Label +1 is bonafide.
struct SvmModel {
  Vector w;
  double b = 0.0;
  Vector norm_mean;
  Vector norm_std;

  int dim() const { return static_cast<int>(w.size()); }
  void Validate() const;
  Vector Normalize(const Vector &x) const;
};

struct SvmConfig {
  double c = 1.0;
  int max_epochs = 1000;
  // Stops once every projected dual gradient is below this.
  double tol = 1e-6;
  uint64_t seed = 0;

  void Validate() const;
  KeyValueList ToKeyValues() const;
  static SvmConfig FromSection(const ConfigSection &section);
};

struct SvmTrainResult {
  SvmModel model;
  // Primal objective of the zero model, then of each epoch's iterate.
  std::vector<double> epoch_objective;
  // Running minimum of epoch_objective: the objective of the returned model
  // as training progresses.
  std::vector<double> best_objective;
  int epochs = 0;
};

/// Primal objective 1/2 (|w|^2 + b^2) + C sum_i max(0, 1 - y_i (w.x_i + b))
/// on already normalized rows.
double SvmObjective(const Matrix &x, const std::vector<int> &y, const Vector &w, double b, double c);

/// Dual coordinate descent for the hinge loss, with the bias folded in as a
/// constant feature.  Rows are visited in a seeded random order each epoch;
/// the iterate with the lowest primal objective is returned.
SvmTrainResult TrainLinearSvm(const Matrix &x, const std::vector<int> &y, const SvmConfig &cfg);

double SvmScore(const SvmModel &model, const Vector &x);

void WriteSvm(const std::string &path, const SvmModel &model, const std::string &tag);
SvmModel ReadSvm(const std::string &path, std::string *tag = nullptr);

}  // namespace spoofkit

#endif  // SPOOFKIT_SVM_H_
