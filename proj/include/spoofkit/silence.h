// include/spoofkit/silence.h

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

#ifndef SPOOFKIT_SILENCE_H_
#define SPOOFKIT_SILENCE_H_

#include <functional>
#include <string>
#include <vector>

#include "spoofkit/audio-io.h"
#include "spoofkit/config-section.h"
#include "spoofkit/protocol.h"

namespace spoofkit {

/// Lengths of the leading and trailing runs of samples with |x| <= epsilon.
/// A buffer made only of such samples reports leading = trailing = total and
/// sets full_silence.
struct SilenceProfile {
  std::string utterance_id;
  size_t leading = 0;
  size_t trailing = 0;
  size_t total = 0;
  bool full_silence = false;
};

SilenceProfile MeasureZeroRuns(const AudioBuffer &buffer, double epsilon = 0.0);

enum class TrimMode { kLeading, kTrailing, kBoth };

std::string ToString(TrimMode mode);
TrimMode TrimModeFromString(const std::string &name);

struct TrimResult {
  AudioBuffer buffer;
  // Set when the whole input was silent; the output is then one zero sample.
  bool full_silence = false;
};

TrimResult TrimSilence(const AudioBuffer &buffer, TrimMode mode, double epsilon = 0.0);

struct RunSummary {
  double mean = 0.0;
  double median = 0.0;
  double p90 = 0.0;
};

// Percentiles use linear interpolation between order statistics.
RunSummary Summarize(std::vector<double> values);

struct SilenceGroup {
  std::string group_type;  // "class" or "attack"
  std::string group;
  size_t count = 0;
  RunSummary leading_samples, trailing_samples;
  RunSummary leading_seconds, trailing_seconds;
};

struct SilenceReportConfig {
  double epsilon = 0.0;
  // Warn when the class trailing-run medians differ by more than this factor.
  double horse_ratio = 1.5;
  int jobs = 1;

  KeyValueList ToKeyValues() const;
  static SilenceReportConfig FromSection(const ConfigSection &section);
};

struct SilenceReport {
  struct Row {
    TrialEntry entry;
    SilenceProfile profile;
    int sample_rate = 0;
  };
  std::vector<Row> rows;  // protocol order, resolvable files only
  std::vector<std::string> missing;
  std::vector<SilenceGroup> groups;  // classes first, then attacks
  bool horse_warning = false;
  double trailing_median_ratio = 0.0;  // spoof / bonafide; inf if bonafide is 0
  bool partial() const { return !missing.empty(); }
};

// Maps an utterance id to an audio path; throws if it cannot.
using AudioLocator = std::function<std::string(const std::string &)>;

/// Measures every protocol utterance.  Unresolvable or unreadable files are
/// listed in `missing` rather than aborting.  An empty protocol is an error.
SilenceReport BuildSilenceReport(const Protocol &protocol, const AudioLocator &locate,
                                 const SilenceReportConfig &cfg);

// Summary CSV (versioned first line) and a per-utterance CSV.
void WriteSilenceSummaryCsv(const std::string &path, const SilenceReport &report);
void WriteSilenceProfilesCsv(const std::string &path, const SilenceReport &report);

}  // namespace spoofkit

#endif  // SPOOFKIT_SILENCE_H_
