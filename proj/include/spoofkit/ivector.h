// include/spoofkit/ivector.h

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

#ifndef SPOOFKIT_IVECTOR_H_
#define SPOOFKIT_IVECTOR_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spoofkit/base.h"
#include "spoofkit/config-section.h"
#include "spoofkit/gmm.h"

namespace spoofkit {

/// Zeroth and first order Baum-Welch statistics of one utterance against a
/// UBM.  first_order is uncentred.
struct SuffStats {
  Vector zeroth;       // K
  Matrix first_order;  // K x D
  double frame_count = 0.0;
};

SuffStats BaumWelchStats(const DiagGmm &ubm, const Matrix &frames);
SuffStats BaumWelchStats(const DiagGmm &ubm, const FeatureMatrix &features);

/// Total-variability model M = m_ubm + T w with w ~ N(0, I).  Row block
/// [k*D, (k+1)*D) of t belongs to component k.
struct TvModel {
  DiagGmm ubm;
  Matrix t;  // (K*D) x R

  int rank() const { return static_cast<int>(t.cols()); }
  void Validate() const;
};

struct TvConfig {
  int rank = 100;
  int iters = 10;
  uint64_t seed = 0;
  int jobs = 1;
  // Utterances per accumulation block; blocks are reduced in order.
  int block_size = 64;

  void Validate() const;
  KeyValueList ToKeyValues() const;
  static TvConfig FromSection(const ConfigSection &section);
};

struct IvectorPosterior {
  Vector mean;        // R
  Matrix precision;   // I + sum_k N_k T_k' S_k^-1 T_k
  Vector linear;      // sum_k T_k' S_k^-1 (F_k - N_k m_k)
  Matrix Covariance() const;
};

IvectorPosterior ComputePosterior(const TvModel &tv, const SuffStats &stats);

// The posterior mean.
Vector ExtractIvector(const TvModel &tv, const SuffStats &stats);

// sum over utterances of -1/2 log|L| + 1/2 b' L^-1 b: the T-dependent part of
// the marginal log-likelihood of the statistics.
double TvObjective(const TvModel &tv, const std::vector<SuffStats> &stats, int jobs = 1);

struct TvTrainResult {
  TvModel model;
  // Objective of the initial T, then after every M-step.
  std::vector<double> trace;
};

/// EM for T.  init_t, when given, replaces the seeded Gaussian start
/// (entries ~ N(0, 1) * 0.1 * mean UBM standard deviation).
TvTrainResult TrainTv(const DiagGmm &ubm, const std::vector<SuffStats> &stats, const TvConfig &cfg,
                      const std::optional<Matrix> &init_t = std::nullopt);

// Concatenation in the given order.
Vector FuseIvectors(const std::vector<Vector> &parts);

void WriteTv(const std::string &path, const TvModel &model);
TvModel ReadTv(const std::string &path);

}  // namespace spoofkit

#endif  // SPOOFKIT_IVECTOR_H_
