// include/spoofkit/feature-extraction.h

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

#ifndef SPOOFKIT_FEATURE_EXTRACTION_H_
#define SPOOFKIT_FEATURE_EXTRACTION_H_

#include <string>
#include <vector>

#include "spoofkit/audio-io.h"
#include "spoofkit/config-section.h"
#include "spoofkit/features.h"

namespace spoofkit {

enum class FeatureKind { kMfcc, kImfcc, kLfcc, kScmc, kCqcc, kLtas };

std::string ToString(FeatureKind kind);
FeatureKind FeatureKindFromString(const std::string &name);

// Defaults give 60-dim SDA cepstra: 25 ms Hamming window, 10 ms hop, 512-point
// FFT, 20 filters, 20 cepstra including c0, regression half-width 2.  CQCC
// uses 96 bins/octave over 9 octaves below Nyquist, resampled to 1024
// uniform bins.
struct FeatureConfig {
  FeatureKind kind = FeatureKind::kLfcc;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int min_fft_size = 512;
  int n_filters = 20;
  int n_ceps = 20;
  bool deltas = true;
  int delta_half_width = 2;
  int cqt_bins_per_octave = 96;
  int cqt_octaves = 9;
  int cqt_uniform_bins = 1024;
  bool cqt_zero_extend = true;
  std::string cmvn = "none";  // none | utterance

  void Validate() const;
  KeyValueList ToKeyValues() const;
  static FeatureConfig FromSection(const ConfigSection &section);
};

// Whole-utterance feature extraction.  LTAS yields a single row.
FeatureMatrix ExtractFeatures(const AudioBuffer &buffer, const FeatureConfig &cfg);

}  // namespace spoofkit

#endif  // SPOOFKIT_FEATURE_EXTRACTION_H_
