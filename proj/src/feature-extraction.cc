// src/feature-extraction.cc

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

#include "spoofkit/feature-extraction.h"

#include <cmath>

#include "spoofkit/base.h"

namespace spoofkit {

std::string ToString(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kMfcc: return "mfcc";
    case FeatureKind::kImfcc: return "imfcc";
    case FeatureKind::kLfcc: return "lfcc";
    case FeatureKind::kScmc: return "scmc";
    case FeatureKind::kCqcc: return "cqcc";
    case FeatureKind::kLtas: return "ltas";
  }
  return "unknown";
}

FeatureKind FeatureKindFromString(const std::string &name) {
  for (FeatureKind k : {FeatureKind::kMfcc, FeatureKind::kImfcc, FeatureKind::kLfcc,
                        FeatureKind::kScmc, FeatureKind::kCqcc, FeatureKind::kLtas})
    if (ToString(k) == name) return k;
  throw Error("unknown feature kind '" + name + "'");
}

void FeatureConfig::Validate() const {
  if (!(window_ms > 0) || !(hop_ms > 0)) throw Error("window_ms and hop_ms must be positive");
  if (n_filters < 2) throw Error("n_filters must be >= 2");
  if (n_ceps < 1 || (kind != FeatureKind::kCqcc && n_ceps > n_filters))
    throw Error("n_ceps must be in [1, n_filters]");
  if (delta_half_width < 1) throw Error("delta_half_width must be >= 1");
  if (cqt_bins_per_octave < 1 || cqt_octaves < 1) throw Error("invalid CQT geometry");
  if (cqt_uniform_bins < n_ceps) throw Error("cqt_uniform_bins must be >= n_ceps");
  if (cmvn != "none" && cmvn != "utterance")
    throw Error("cmvn must be 'none' or 'utterance', got '" + cmvn + "'");
}

KeyValueList FeatureConfig::ToKeyValues() const {
  return {{"kind", ToString(kind)},
          {"window_ms", FormatDouble(window_ms)},
          {"hop_ms", FormatDouble(hop_ms)},
          {"min_fft_size", std::to_string(min_fft_size)},
          {"n_filters", std::to_string(n_filters)},
          {"n_ceps", std::to_string(n_ceps)},
          {"deltas", deltas ? "true" : "false"},
          {"delta_half_width", std::to_string(delta_half_width)},
          {"cqt_bins_per_octave", std::to_string(cqt_bins_per_octave)},
          {"cqt_octaves", std::to_string(cqt_octaves)},
          {"cqt_uniform_bins", std::to_string(cqt_uniform_bins)},
          {"cqt_zero_extend", cqt_zero_extend ? "true" : "false"},
          {"cmvn", cmvn}};
}

FeatureConfig FeatureConfig::FromSection(const ConfigSection &s) {
  FeatureConfig c;
  c.kind = FeatureKindFromString(s.String("kind", ToString(c.kind)));
  c.window_ms = s.Double("window_ms", c.window_ms);
  c.hop_ms = s.Double("hop_ms", c.hop_ms);
  c.min_fft_size = s.Int("min_fft_size", c.min_fft_size);
  c.n_filters = s.Int("n_filters", c.n_filters);
  c.n_ceps = s.Int("n_ceps", c.n_ceps);
  c.deltas = s.Bool("deltas", c.deltas);
  c.delta_half_width = s.Int("delta_half_width", c.delta_half_width);
  c.cqt_bins_per_octave = s.Int("cqt_bins_per_octave", c.cqt_bins_per_octave);
  c.cqt_octaves = s.Int("cqt_octaves", c.cqt_octaves);
  c.cqt_uniform_bins = s.Int("cqt_uniform_bins", c.cqt_uniform_bins);
  c.cqt_zero_extend = s.Bool("cqt_zero_extend", c.cqt_zero_extend);
  c.cmvn = s.String("cmvn", c.cmvn);
  c.Validate();
  return c;
}

FeatureMatrix ExtractFeatures(const AudioBuffer &buffer, const FeatureConfig &cfg) {
  cfg.Validate();
  if (buffer.sample_rate <= 0) throw Error("audio has no sample rate");
  FeatureMatrix statics;
  if (cfg.kind == FeatureKind::kCqcc) {
    CqtConfig cqt;
    cqt.bins_per_octave = cfg.cqt_bins_per_octave;
    cqt.f_max = buffer.sample_rate / 2.0;
    cqt.f_min = cqt.f_max / std::exp2(cfg.cqt_octaves);
    cqt.hop = std::max(1, static_cast<int>(std::lround(buffer.sample_rate * cfg.hop_ms / 1000.0)));
    cqt.zero_extend = cfg.cqt_zero_extend;
    statics = Cqcc(CqtMagnitude(buffer, cqt), cfg.n_ceps, cfg.cqt_uniform_bins);
  } else {
    const StftConfig stft =
        StftConfig::FromMilliseconds(buffer.sample_rate, cfg.window_ms, cfg.hop_ms, cfg.min_fft_size);
    const Matrix mag = StftMagnitude(buffer, stft);
    switch (cfg.kind) {
      case FeatureKind::kMfcc:
      case FeatureKind::kImfcc:
      case FeatureKind::kLfcc: {
        const FilterKind fk = cfg.kind == FeatureKind::kMfcc    ? FilterKind::kMel
                              : cfg.kind == FeatureKind::kImfcc ? FilterKind::kInvertedMel
                                                                : FilterKind::kLinear;
        statics = FilterbankCepstra(mag, MakeFilterBank(fk, cfg.n_filters, stft, buffer.sample_rate),
                                    cfg.n_ceps);
        break;
      }
      case FeatureKind::kScmc:
        statics = Scmc(mag, MakeFilterBank(FilterKind::kMel, cfg.n_filters, stft, buffer.sample_rate),
                       cfg.n_ceps);
        break;
      case FeatureKind::kLtas: {
        FeatureMatrix out;
        out.kind = "ltas";
        out.data = Ltas(mag).transpose();
        out.n_static = out.dims();
        if (cfg.cmvn == "utterance") throw Error("utterance CMVN is undefined for single-row LTAS");
        return out;
      }
      case FeatureKind::kCqcc:
        break;
    }
  }
  FeatureMatrix out = cfg.deltas ? AddDeltas(statics, cfg.delta_half_width) : statics;
  if (cfg.cmvn == "utterance") out = Cmvn(out);
  out.Validate();
  return out;
}

}  // namespace spoofkit
