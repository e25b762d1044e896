// include/spoofkit/synth.h

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

#ifndef SPOOFKIT_SYNTH_H_
#define SPOOFKIT_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "spoofkit/audio-io.h"
#include "spoofkit/config-section.h"
#include "spoofkit/protocol.h"

namespace spoofkit {

/// Synthetic two-class corpus in which, by default, the only class cue is the
/// length of the trailing zero run.
///
/// Content: a harmonic tone (random f0, random decaying partials, slow
/// amplitude modulation) plus white noise, drawn from one distribution for
/// both classes, quantized to int16 with no zero samples inside.
/// Leading zeros ~ U{0..max_leading} for both classes.  Trailing zeros: pair
/// i shares a base length b_i ~ U{0..max_trailing_base}; the bonafide file
/// gets b_i zeros, the spoof file b_i + spoof_trailing_offset.
/// With silence = false there are no leading or trailing zeros at all.
///
/// Speakers are assigned round-robin; the first half of the speakers form
/// the train protocol, the rest dev.  Spoof attack ids cycle through
/// num_attacks ids "A01", "A02", ...
struct SynthConfig {
  int num_pairs = 500;
  int sample_rate = 16000;
  int num_speakers = 20;
  int num_attacks = 2;
  double min_content_seconds = 0.5;
  double max_content_seconds = 1.0;
  int max_leading = 1600;
  int max_trailing_base = 399;
  int spoof_trailing_offset = 8000;
  bool silence = true;
  uint64_t seed = 0;

  void Validate() const;
  KeyValueList ToKeyValues() const;
  static SynthConfig FromSection(const ConfigSection &section);
};

struct SynthUtterance {
  TrialEntry entry;
  AudioBuffer audio;
  bool train = false;
};

std::vector<SynthUtterance> GenerateSynthCorpus(const SynthConfig &cfg);

// Writes <dir>/audio/<utt>.wav and the protocols train.txt, dev.txt and
// all.txt.  Returns the number of files written.
size_t WriteSynthCorpus(const std::string &dir, const SynthConfig &cfg, int jobs = 1);

}  // namespace spoofkit

#endif  // SPOOFKIT_SYNTH_H_
