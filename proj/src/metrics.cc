// src/metrics.cc

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

#include "spoofkit/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "spoofkit/base.h"

namespace spoofkit {

namespace {

struct OperatingPoint {
  double threshold;
  double p_miss;
  double p_fa;
};

// Error rates at every distinct score and at +inf.  P_miss rises and P_fa
// falls along the returned sequence.
std::vector<OperatingPoint> OperatingPoints(const ScoreSet &scores) {
  std::vector<double> bona = scores.bonafide, spoof = scores.spoof;
  std::sort(bona.begin(), bona.end());
  std::sort(spoof.begin(), spoof.end());
  std::vector<double> thresholds;
  thresholds.reserve(bona.size() + spoof.size() + 1);
  std::merge(bona.begin(), bona.end(), spoof.begin(), spoof.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());

  const double nb = static_cast<double>(bona.size()), ns = static_cast<double>(spoof.size());
  std::vector<OperatingPoint> out;
  out.reserve(thresholds.size());
  size_t ib = 0, is = 0;
  for (double t : thresholds) {
    while (ib < bona.size() && bona[ib] < t) ++ib;
    while (is < spoof.size() && spoof[is] < t) ++is;
    out.push_back({t, ib / nb, (spoof.size() - is) / ns});
  }
  return out;
}

double Cross(const OperatingPoint &o, const OperatingPoint &a, const OperatingPoint &b) {
  return (a.p_fa - o.p_fa) * (b.p_miss - o.p_miss) - (a.p_miss - o.p_miss) * (b.p_fa - o.p_fa);
}

void CheckRate(const std::optional<double> &v, const char *name) {
  if (!v) throw Error(std::string("cost model: ") + name + " is required");
  if (!(*v >= 0.0 && *v <= 1.0)) throw Error(std::string("cost model: ") + name + " must be in [0, 1]");
}

}  // namespace

void ScoreSet::Validate() const {
  if (bonafide.empty()) throw Error("no bonafide scores");
  if (spoof.empty()) throw Error("no spoof scores");
  for (double s : bonafide)
    if (!std::isfinite(s)) throw Error("non-finite bonafide score");
  for (double s : spoof)
    if (!std::isfinite(s)) throw Error("non-finite spoof score");
}

EerResult ComputeEer(const ScoreSet &scores) {
  scores.Validate();
  const std::vector<OperatingPoint> pts = OperatingPoints(scores);

  // Lower convex hull in the (P_fa, P_miss) plane.  Points arrive with P_fa
  // decreasing, so walk them backwards.
  std::vector<OperatingPoint> hull;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    while (hull.size() >= 2 && Cross(hull[hull.size() - 2], hull.back(), *it) <= 0.0) hull.pop_back();
    hull.push_back(*it);
  }
  // hull now runs from (P_fa = 0, P_miss = 1) to (P_fa = 1, P_miss = 0), so
  // d = P_miss - P_fa goes from +1 to -1.
  for (size_t i = 0; i + 1 < hull.size(); ++i) {
    const OperatingPoint &a = hull[i], &b = hull[i + 1];
    const double da = a.p_miss - a.p_fa, db = b.p_miss - b.p_fa;
    if (da == 0.0) return {a.p_miss, a.threshold};
    if (da > 0.0 && db <= 0.0) {
      if (db == 0.0) return {b.p_miss, b.threshold};
      const double alpha = da / (da - db);
      const double eer = a.p_miss + alpha * (b.p_miss - a.p_miss);
      return {eer, alpha < 0.5 ? a.threshold : b.threshold};
    }
  }
  // Unreachable for non-empty classes: the hull always spans both corners.
  throw Error("EER: ROC hull does not cross the diagonal");
}

void CostModel::Validate() const {
  for (double p : {p_target, p_nontarget, p_spoof})
    if (!(p >= 0.0 && p <= 1.0)) throw Error("cost model: priors must be in [0, 1]");
  if (std::abs(p_target + p_nontarget + p_spoof - 1.0) > 1e-10)
    throw Error("cost model: priors must sum to 1");
  for (double c : {c_miss_asv, c_fa_asv, c_miss_cm, c_fa_cm})
    if (!(c > 0.0) || !std::isfinite(c)) throw Error("cost model: costs must be positive");
  CheckRate(p_miss_asv, "p_miss_asv");
  CheckRate(p_fa_asv, "p_fa_asv");
  CheckRate(p_miss_spoof_asv, "p_miss_spoof_asv");
}

KeyValueList CostModel::ToKeyValues() const {
  auto opt = [](const std::optional<double> &v) { return v ? FormatDouble(*v) : std::string(); };
  return {{"p_target", FormatDouble(p_target)},
          {"p_nontarget", FormatDouble(p_nontarget)},
          {"p_spoof", FormatDouble(p_spoof)},
          {"c_miss_asv", FormatDouble(c_miss_asv)},
          {"c_fa_asv", FormatDouble(c_fa_asv)},
          {"c_miss_cm", FormatDouble(c_miss_cm)},
          {"c_fa_cm", FormatDouble(c_fa_cm)},
          {"p_miss_asv", opt(p_miss_asv)},
          {"p_fa_asv", opt(p_fa_asv)},
          {"p_miss_spoof_asv", opt(p_miss_spoof_asv)}};
}

CostModel CostModel::FromSection(const ConfigSection &s) {
  CostModel c;
  c.p_target = s.Double("p_target", c.p_target);
  c.p_nontarget = s.Double("p_nontarget", c.p_nontarget);
  c.p_spoof = s.Double("p_spoof", c.p_spoof);
  c.c_miss_asv = s.Double("c_miss_asv", c.c_miss_asv);
  c.c_fa_asv = s.Double("c_fa_asv", c.c_fa_asv);
  c.c_miss_cm = s.Double("c_miss_cm", c.c_miss_cm);
  c.c_fa_cm = s.Double("c_fa_cm", c.c_fa_cm);
  // An empty value means "not supplied", as printed by --dump-config.
  auto opt = [&s](const char *key) -> std::optional<double> {
    if (!s.Has(key) || s.String(key, "").empty()) {
      s.String(key, "");
      return std::nullopt;
    }
    return s.Double(key, 0.0);
  };
  c.p_miss_asv = opt("p_miss_asv");
  c.p_fa_asv = opt("p_fa_asv");
  c.p_miss_spoof_asv = opt("p_miss_spoof_asv");
  return c;
}

TdcfCoefficients ComputeTdcfCoefficients(const CostModel &cost) {
  cost.Validate();
  TdcfCoefficients k;
  k.c1 = cost.p_target * (cost.c_miss_cm - cost.c_miss_asv * *cost.p_miss_asv) -
         cost.p_nontarget * cost.c_fa_asv * *cost.p_fa_asv;
  k.c2 = cost.c_fa_cm * cost.p_spoof * (1.0 - *cost.p_miss_spoof_asv);
  if (!(k.c1 > 0.0) || !(k.c2 > 0.0))
    throw Error("t-DCF coefficients must be positive (C1=" + FormatDouble(k.c1) +
                ", C2=" + FormatDouble(k.c2) + "); check the ASV operating point and priors");
  return k;
}

MinTdcfResult ComputeMinTdcf(const ScoreSet &scores, const CostModel &cost) {
  const TdcfCoefficients k = ComputeTdcfCoefficients(cost);
  scores.Validate();
  const double norm = std::min(k.c1, k.c2);
  MinTdcfResult best{std::numeric_limits<double>::infinity(), 0.0};
  for (const OperatingPoint &p : OperatingPoints(scores)) {
    const double v = (k.c1 * p.p_miss + k.c2 * p.p_fa) / norm;
    if (v < best.min_tdcf) best = {v, p.threshold};
  }
  return best;
}

std::vector<SweepPoint> ThresholdSweep(const ScoreSet &scores,
                                       const std::optional<TdcfCoefficients> &coef) {
  scores.Validate();
  std::vector<SweepPoint> out;
  for (const OperatingPoint &p : OperatingPoints(scores)) {
    double t = std::numeric_limits<double>::quiet_NaN();
    if (coef) t = (coef->c1 * p.p_miss + coef->c2 * p.p_fa) / std::min(coef->c1, coef->c2);
    out.push_back({p.threshold, p.p_miss, p.p_fa, t});
  }
  return out;
}

void WriteSweepCsv(const std::string &path, const std::vector<SweepPoint> &sweep) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "threshold,p_miss,p_fa,tdcf\n";
  for (const SweepPoint &p : sweep)
    os << FormatDouble(p.threshold) << ',' << FormatDouble(p.p_miss) << ','
       << FormatDouble(p.p_fa) << ',' << (std::isnan(p.tdcf) ? std::string() : FormatDouble(p.tdcf))
       << '\n';
  if (!os) throw Error("write failed: " + path);
}

}  // namespace spoofkit
