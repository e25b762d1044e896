// include/spoofkit/countermeasure.h

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

#ifndef SPOOFKIT_COUNTERMEASURE_H_
#define SPOOFKIT_COUNTERMEASURE_H_

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spoofkit/audio-io.h"
#include "spoofkit/experiment-config.h"
#include "spoofkit/feature-extraction.h"
#include "spoofkit/gmm.h"
#include "spoofkit/ivector.h"
#include "spoofkit/metrics.h"
#include "spoofkit/protocol.h"
#include "spoofkit/silence.h"
#include "spoofkit/svm.h"

namespace spoofkit {

enum class Backend { kGmm, kIvectorSvm, kLtasSvm };

std::string ToString(Backend backend);
Backend BackendFromString(const std::string &name);

// gmm:         one feature stream, a GMM per class, average-LLR score.
// ivector-svm: one or more streams, each with its own UBM and T matrix;
//              i-vectors are concatenated and scored by a linear SVM.
// ltas-svm:    a single LTAS stream scored by a linear SVM.
struct PipelineConfig {
  Backend backend = Backend::kGmm;
  std::vector<FeatureConfig> features = {FeatureConfig{}};
  int num_components = 128;  // per-class GMM, or UBM size
  EmConfig em;
  TvConfig tv;
  SvmConfig svm;
  int jobs = 1;

  void Validate() const;
  // Reads [pipeline] and [features], plus [gmm], [tv] and [svm] as far as
  // the backend needs them.  The [features] section holds the settings
  // shared by all streams; the stream kinds come from `pipeline.features`.
  static PipelineConfig FromConfig(const IniConfig &config);
  static std::vector<std::string> SectionsUsed(Backend backend);
};

// Stream list from [pipeline] features, each built from the shared
// [features] settings.  `fallback` applies when the list is empty.
std::vector<FeatureConfig> FeatureStreamsFromConfig(const IniConfig &config,
                                                    const std::string &fallback = "lfcc");

// Everything a trained countermeasure needs at scoring time.
struct Countermeasure {
  Backend backend = Backend::kGmm;
  std::vector<FeatureConfig> features;
  DiagGmm bonafide;              // gmm
  DiagGmm spoof;                 // gmm
  std::vector<TvModel> tv;       // ivector-svm, one per stream
  SvmModel svm;                  // ivector-svm, ltas-svm
};

// Maps an utterance id to its waveform.
using AudioLoader = std::function<AudioBuffer(const std::string &)>;

struct LabelledUtterance {
  std::string utterance;
  bool bonafide = false;
};

std::vector<LabelledUtterance> LabelsFromProtocol(const Protocol &protocol);

// features[s][u]: stream s of utterance u.  Each file is loaded once.
std::vector<std::vector<FeatureMatrix>> ExtractStreams(const std::vector<std::string> &utterances,
                                                       const AudioLoader &load,
                                                       const std::vector<FeatureConfig> &streams,
                                                       int jobs);

Countermeasure TrainCountermeasure(const std::vector<LabelledUtterance> &train, const AudioLoader &load,
                                   const PipelineConfig &cfg);

// Higher score = more bonafide.
std::vector<double> ScoreCountermeasure(const Countermeasure &cm,
                                        const std::vector<std::string> &utterances,
                                        const AudioLoader &load, int jobs);

enum class InterventionMode { kI, kII, kIII };

std::string ToString(InterventionMode mode);
InterventionMode InterventionModeFromString(const std::string &name);

struct InterventionConfig {
  TrimMode trim = TrimMode::kTrailing;
  double epsilon = 0.0;

  static InterventionConfig FromSection(const ConfigSection &section);
  KeyValueList ToKeyValues() const;
};

struct OperatingMetrics {
  double eer = 0.0;
  std::optional<double> min_tdcf;  // only with an ASV operating point
};

struct InterventionResult {
  InterventionMode mode = InterventionMode::kI;
  OperatingMetrics after;
  std::vector<double> scores;
  size_t full_silence_train = 0;
  size_t full_silence_test = 0;
};

struct InterventionReport {
  OperatingMetrics baseline;
  std::vector<double> baseline_scores;
  std::vector<std::string> test_utterances;
  std::vector<InterventionResult> results;
  size_t n_train = 0;
  size_t n_test = 0;
};

OperatingMetrics EvaluateScores(const std::vector<double> &scores,
                                const std::vector<LabelledUtterance> &test,
                                const CostModel &cost);

// Trains and scores the untrimmed baseline once, then each requested mode:
//   I   baseline model, trimmed test audio
//   II  model trained on trimmed audio, untrimmed test audio
//   III trimmed train and test audio
// The baseline model is reused for mode I; II and III share one retrained
// model when both are requested.
InterventionReport RunIntervention(const std::vector<InterventionMode> &modes,
                                   const std::vector<LabelledUtterance> &train,
                                   const std::vector<LabelledUtterance> &test,
                                   const AudioLoader &load, const PipelineConfig &pipeline,
                                   const InterventionConfig &icfg, const CostModel &cost);

// Before/after table, e.g.
//   mode  t-DCF(before)  t-DCF(after)  EER%(before)  EER%(after)
void WriteInterventionTable(std::ostream &os, const InterventionReport &report);

}  // namespace spoofkit

#endif  // SPOOFKIT_COUNTERMEASURE_H_
