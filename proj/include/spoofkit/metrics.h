// include/spoofkit/metrics.h

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

#ifndef SPOOFKIT_METRICS_H_
#define SPOOFKIT_METRICS_H_

#include <optional>
#include <string>
#include <vector>

#include "spoofkit/base.h"
#include "spoofkit/config-section.h"

namespace spoofkit {

/// Countermeasure scores split by ground truth.  Higher scores mean "more
/// bonafide"; a score s is accepted at threshold t when s >= t.
struct ScoreSet {
  std::vector<double> bonafide;
  std::vector<double> spoof;

  void Validate() const;
};

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

/// EER of the ROC convex hull.  Operating points are taken at every distinct
/// score plus +inf; the hull is intersected with P_miss = P_fa by linear
/// interpolation.  The reported threshold belongs to the hull vertex nearest
/// the crossing.
EerResult ComputeEer(const ScoreSet &scores);

/// t-DCF cost model.  The ASV operating point has no defaults: it comes from
/// an ASV system that this toolkit does not implement.
struct CostModel {
  double p_target = 0.9405;
  double p_nontarget = 0.0095;
  double p_spoof = 0.05;
  double c_miss_asv = 1.0;
  double c_fa_asv = 10.0;
  double c_miss_cm = 1.0;
  double c_fa_cm = 10.0;
  std::optional<double> p_miss_asv;
  std::optional<double> p_fa_asv;
  std::optional<double> p_miss_spoof_asv;

  bool HasAsvOperatingPoint() const {
    return p_miss_asv && p_fa_asv && p_miss_spoof_asv;
  }
  void Validate() const;
  KeyValueList ToKeyValues() const;
  static CostModel FromSection(const ConfigSection &section);
};

struct TdcfCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
};

// C1 = p_tar (Cmiss_cm - Cmiss_asv Pmiss_asv) - p_non Cfa_asv Pfa_asv
// C2 = Cfa_cm p_spoof (1 - Pmiss_spoof_asv)
// Throws unless both are positive.
TdcfCoefficients ComputeTdcfCoefficients(const CostModel &cost);

struct MinTdcfResult {
  double min_tdcf = 0.0;
  double threshold = 0.0;
};

/// min over thresholds of (C1 P_miss + C2 P_fa) / min(C1, C2).
MinTdcfResult ComputeMinTdcf(const ScoreSet &scores, const CostModel &cost);

struct SweepPoint {
  double threshold;
  double p_miss;
  double p_fa;
  double tdcf;  // normalized; NaN when no cost model was given
};

// One point per distinct score plus +inf, in increasing threshold order.
std::vector<SweepPoint> ThresholdSweep(const ScoreSet &scores,
                                       const std::optional<TdcfCoefficients> &coef);

void WriteSweepCsv(const std::string &path, const std::vector<SweepPoint> &sweep);

}  // namespace spoofkit

#endif  // SPOOFKIT_METRICS_H_
