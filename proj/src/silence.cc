// src/silence.cc

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

#include "spoofkit/silence.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "spoofkit/parallel.h"

namespace spoofkit {

namespace {

constexpr const char *kSummarySchema = "# spoofkit silence summary v1";
constexpr const char *kProfileSchema = "# spoofkit silence profiles v1";

SilenceGroup MakeGroup(const std::string &type, const std::string &name,
                       const std::vector<const SilenceReport::Row *> &rows) {
  SilenceGroup g;
  g.group_type = type;
  g.group = name;
  g.count = rows.size();
  std::vector<double> ls, ts, lsec, tsec;
  for (const SilenceReport::Row *r : rows) {
    ls.push_back(static_cast<double>(r->profile.leading));
    ts.push_back(static_cast<double>(r->profile.trailing));
    lsec.push_back(static_cast<double>(r->profile.leading) / r->sample_rate);
    tsec.push_back(static_cast<double>(r->profile.trailing) / r->sample_rate);
  }
  g.leading_samples = Summarize(ls);
  g.trailing_samples = Summarize(ts);
  g.leading_seconds = Summarize(lsec);
  g.trailing_seconds = Summarize(tsec);
  return g;
}

std::ofstream OpenOut(const std::string &path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  return os;
}

}  // namespace

SilenceProfile MeasureZeroRuns(const AudioBuffer &buffer, double epsilon) {
  SilenceProfile p;
  p.utterance_id = buffer.source_id;
  p.total = buffer.size();
  const auto silent = [epsilon](double x) { return std::abs(x) <= epsilon; };
  const auto first = std::find_if_not(buffer.samples.begin(), buffer.samples.end(), silent);
  if (first == buffer.samples.end()) {
    p.leading = p.trailing = p.total;
    p.full_silence = true;
    return p;
  }
  p.leading = static_cast<size_t>(first - buffer.samples.begin());
  const auto last = std::find_if_not(buffer.samples.rbegin(), buffer.samples.rend(), silent);
  p.trailing = static_cast<size_t>(last - buffer.samples.rbegin());
  return p;
}

std::string ToString(TrimMode mode) {
  switch (mode) {
    case TrimMode::kLeading: return "leading";
    case TrimMode::kTrailing: return "trailing";
    case TrimMode::kBoth: return "both";
  }
  return "";
}

TrimMode TrimModeFromString(const std::string &name) {
  for (TrimMode m : {TrimMode::kLeading, TrimMode::kTrailing, TrimMode::kBoth})
    if (ToString(m) == name) return m;
  throw Error("unknown trim mode '" + name + "' (expected leading, trailing or both)");
}

TrimResult TrimSilence(const AudioBuffer &buffer, TrimMode mode, double epsilon) {
  if (buffer.samples.empty()) throw Error("cannot trim an empty buffer");
  const SilenceProfile p = MeasureZeroRuns(buffer, epsilon);
  TrimResult r;
  r.buffer.sample_rate = buffer.sample_rate;
  r.buffer.source_id = buffer.source_id;
  if (p.full_silence) {
    r.full_silence = true;
    r.buffer.samples.assign(1, 0.0);
    return r;
  }
  const size_t begin = mode == TrimMode::kTrailing ? 0 : p.leading;
  const size_t end = mode == TrimMode::kLeading ? p.total : p.total - p.trailing;
  r.buffer.samples.assign(buffer.samples.begin() + begin, buffer.samples.begin() + end);
  return r;
}

RunSummary Summarize(std::vector<double> v) {
  RunSummary s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / v.size();
  const auto pct = [&v](double q) {
    const double pos = q * (v.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
  };
  s.median = pct(0.5);
  s.p90 = pct(0.9);
  return s;
}

KeyValueList SilenceReportConfig::ToKeyValues() const {
  return {{"epsilon", FormatDouble(epsilon)}, {"horse_ratio", FormatDouble(horse_ratio)}};
}

SilenceReportConfig SilenceReportConfig::FromSection(const ConfigSection &s) {
  SilenceReportConfig c;
  c.epsilon = s.Double("epsilon", c.epsilon);
  c.horse_ratio = s.Double("horse_ratio", c.horse_ratio);
  if (!(c.epsilon >= 0.0)) throw Error("[silence] epsilon must be non-negative");
  if (!(c.horse_ratio >= 1.0)) throw Error("[silence] horse_ratio must be at least 1");
  return c;
}

SilenceReport BuildSilenceReport(const Protocol &protocol, const AudioLocator &locate,
                                 const SilenceReportConfig &cfg) {
  if (protocol.empty()) throw Error("silence report: protocol is empty");
  if (!(cfg.horse_ratio >= 1.0)) throw Error("silence report: horse_ratio must be >= 1");
  if (!(cfg.epsilon >= 0.0)) throw Error("silence report: epsilon must be >= 0");

  struct Slot {
    bool ok = false;
    SilenceProfile profile;
    int sample_rate = 0;
    std::string error;
  };
  std::vector<Slot> slots(protocol.size());
  ParallelFor(protocol.size(), cfg.jobs, [&](size_t i) {
    try {
      const AudioBuffer b = ReadAudio(locate(protocol[i].utterance));
      slots[i].profile = MeasureZeroRuns(b, cfg.epsilon);
      slots[i].profile.utterance_id = protocol[i].utterance;
      slots[i].sample_rate = b.sample_rate;
      slots[i].ok = true;
    } catch (const Error &e) {
      slots[i].error = e.what();
    }
  });

  SilenceReport report;
  for (size_t i = 0; i < protocol.size(); ++i) {
    if (slots[i].ok) report.rows.push_back({protocol[i], slots[i].profile, slots[i].sample_rate});
    else report.missing.push_back(protocol[i].utterance + ": " + slots[i].error);
  }
  if (report.rows.empty()) throw Error("silence report: no protocol utterance could be read");

  std::map<std::string, std::vector<const SilenceReport::Row *>> by_class, by_attack;
  for (const auto &r : report.rows) {
    by_class[ToString(r.entry.key)].push_back(&r);
    if (!r.entry.is_bonafide()) by_attack[r.entry.attack].push_back(&r);
  }
  for (const char *c : {"bonafide", "spoof"})
    if (by_class.count(c)) report.groups.push_back(MakeGroup("class", c, by_class[c]));
  for (const auto &[attack, rows] : by_attack) report.groups.push_back(MakeGroup("attack", attack, rows));

  if (by_class.count("bonafide") && by_class.count("spoof")) {
    const double mb = report.groups[0].trailing_samples.median;
    const double ms = report.groups[1].trailing_samples.median;
    report.trailing_median_ratio = mb > 0 ? ms / mb : (ms > 0 ? std::numeric_limits<double>::infinity() : 1.0);
    const double hi = std::max(mb, ms), lo = std::min(mb, ms);
    report.horse_warning = hi > 0 && (lo == 0 || hi / lo > cfg.horse_ratio);
  }
  return report;
}

void WriteSilenceSummaryCsv(const std::string &path, const SilenceReport &report) {
  std::ofstream os = OpenOut(path);
  os << kSummarySchema << '\n';
  os << "group_type,group,count,"
        "leading_mean,leading_median,leading_p90,trailing_mean,trailing_median,trailing_p90,"
        "leading_mean_s,leading_median_s,leading_p90_s,trailing_mean_s,trailing_median_s,trailing_p90_s\n";
  const auto put = [&os](const RunSummary &s) {
    os << ',' << FormatDouble(s.mean) << ',' << FormatDouble(s.median) << ',' << FormatDouble(s.p90);
  };
  for (const SilenceGroup &g : report.groups) {
    os << g.group_type << ',' << g.group << ',' << g.count;
    put(g.leading_samples);
    put(g.trailing_samples);
    put(g.leading_seconds);
    put(g.trailing_seconds);
    os << '\n';
  }
  os << "# horse_warning=" << (report.horse_warning ? 1 : 0)
     << " trailing_median_ratio=" << FormatDouble(report.trailing_median_ratio)
     << " missing=" << report.missing.size() << '\n';
  if (!os) throw Error("write failed: " + path);
}

void WriteSilenceProfilesCsv(const std::string &path, const SilenceReport &report) {
  std::ofstream os = OpenOut(path);
  os << kProfileSchema << '\n';
  os << "utterance_id,key,attack,sample_rate,total,leading,trailing,full_silence\n";
  for (const auto &r : report.rows)
    os << r.entry.utterance << ',' << ToString(r.entry.key) << ',' << r.entry.attack << ','
       << r.sample_rate << ',' << r.profile.total << ',' << r.profile.leading << ','
       << r.profile.trailing << ',' << (r.profile.full_silence ? 1 : 0) << '\n';
  if (!os) throw Error("write failed: " + path);
}

}  // namespace spoofkit
