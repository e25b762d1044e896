// src/synth.cc

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

#include "spoofkit/synth.h"

#include <cmath>
#include <filesystem>
#include <cstdio>
#include <numbers>

#include "spoofkit/base.h"
#include "spoofkit/parallel.h"
#include "spoofkit/random.h"

namespace spoofkit {

void SynthConfig::Validate() const {
  if (num_pairs < 1) throw Error("[synth] num_pairs must be positive");
  if (sample_rate < 1000) throw Error("[synth] sample_rate too low");
  if (num_speakers < 2) throw Error("[synth] need at least two speakers");
  if (num_attacks < 1) throw Error("[synth] num_attacks must be positive");
  if (!(min_content_seconds > 0.0 && max_content_seconds >= min_content_seconds))
    throw Error("[synth] bad content length range");
  if (max_leading < 0 || max_trailing_base < 0 || spoof_trailing_offset < 0)
    throw Error("[synth] silence lengths must be non-negative");
}

KeyValueList SynthConfig::ToKeyValues() const {
  return {{"num_pairs", std::to_string(num_pairs)},
          {"sample_rate", std::to_string(sample_rate)},
          {"num_speakers", std::to_string(num_speakers)},
          {"num_attacks", std::to_string(num_attacks)},
          {"min_content_seconds", FormatDouble(min_content_seconds)},
          {"max_content_seconds", FormatDouble(max_content_seconds)},
          {"max_leading", std::to_string(max_leading)},
          {"max_trailing_base", std::to_string(max_trailing_base)},
          {"spoof_trailing_offset", std::to_string(spoof_trailing_offset)},
          {"silence", silence ? "true" : "false"},
          {"seed", std::to_string(seed)}};
}

SynthConfig SynthConfig::FromSection(const ConfigSection &s) {
  SynthConfig c;
  c.num_pairs = s.Int("num_pairs", c.num_pairs);
  c.sample_rate = s.Int("sample_rate", c.sample_rate);
  c.num_speakers = s.Int("num_speakers", c.num_speakers);
  c.num_attacks = s.Int("num_attacks", c.num_attacks);
  c.min_content_seconds = s.Double("min_content_seconds", c.min_content_seconds);
  c.max_content_seconds = s.Double("max_content_seconds", c.max_content_seconds);
  c.max_leading = s.Int("max_leading", c.max_leading);
  c.max_trailing_base = s.Int("max_trailing_base", c.max_trailing_base);
  c.spoof_trailing_offset = s.Int("spoof_trailing_offset", c.spoof_trailing_offset);
  c.silence = s.Bool("silence", c.silence);
  c.seed = s.Seed("seed");
  c.Validate();
  return c;
}

namespace {

uint64_t StreamSeed(uint64_t seed, uint64_t stream) {
  // splitmix64 finalizer
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Same distribution whatever the class; none of the samples is zero.
std::vector<double> Content(const SynthConfig &cfg, Rng *rng) {
  const int lo = static_cast<int>(std::lround(cfg.min_content_seconds * cfg.sample_rate));
  const int hi = static_cast<int>(std::lround(cfg.max_content_seconds * cfg.sample_rate));
  const int n = lo + static_cast<int>(rng->Below(hi - lo + 1));
  const double fs = cfg.sample_rate;
  const double f0 = rng->Uniform(90.0, 250.0);
  const int partials = 3 + static_cast<int>(rng->Below(8));
  std::vector<double> amp, phase;
  for (int k = 1; k <= partials; ++k) {
    amp.push_back(rng->Uniform(0.3, 1.0) / k);
    phase.push_back(rng->Uniform(0.0, 2.0 * std::numbers::pi));
  }
  const double fm = rng->Uniform(2.0, 6.0), fm_phase = rng->Uniform(0.0, 2.0 * std::numbers::pi);
  const double noise = rng->Uniform(0.01, 0.1);
  std::vector<double> x(n);
  double peak = 0.0;
  for (int t = 0; t < n; ++t) {
    double v = 0.0;
    for (int k = 1; k <= partials; ++k) {
      const double f = f0 * k;
      if (f < fs / 2) v += amp[k - 1] * std::sin(2.0 * std::numbers::pi * f * t / fs + phase[k - 1]);
    }
    v *= 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * fm * t / fs + fm_phase);
    v += noise * rng->Normal();
    x[t] = v;
    peak = std::max(peak, std::abs(v));
  }
  const double gain = rng->Uniform(0.3, 0.9) / peak;
  for (double &v : x) {
    long q = std::lround(v * gain * 32767.0);
    if (q == 0) q = v < 0 ? -1 : 1;
    v = static_cast<double>(q) / 32767.0;
  }
  return x;
}

}  // namespace

std::vector<SynthUtterance> GenerateSynthCorpus(const SynthConfig &cfg) {
  cfg.Validate();
  const int n = cfg.num_pairs;
  std::vector<int> trailing_base(n);
  Rng pair_rng(StreamSeed(cfg.seed, 0));
  for (int &b : trailing_base) b = static_cast<int>(pair_rng.Below(cfg.max_trailing_base + 1));

  std::vector<SynthUtterance> out(2 * n);
  ParallelFor(out.size(), 1, [&](size_t idx) {
    const int i = static_cast<int>(idx / 2);
    const bool bona = idx % 2 == 0;
    Rng rng(StreamSeed(cfg.seed, idx + 1));
    std::vector<double> content = Content(cfg, &rng);
    const int leading = cfg.silence ? static_cast<int>(rng.Below(cfg.max_leading + 1)) : 0;
    const int trailing =
        cfg.silence ? trailing_base[i] + (bona ? 0 : cfg.spoof_trailing_offset) : 0;

    SynthUtterance &u = out[idx];
    const int speaker = i % cfg.num_speakers;
    char id[32];
    std::snprintf(id, sizeof(id), "SYN_%c_%05d", bona ? 'B' : 'S', i);
    char spk[16];
    std::snprintf(spk, sizeof(spk), "SPK%03d", speaker);
    char attack[16];
    std::snprintf(attack, sizeof(attack), "A%02d", i % cfg.num_attacks + 1);
    u.entry.speaker = spk;
    u.entry.utterance = id;
    u.entry.attack = bona ? "-" : attack;
    u.entry.key = bona ? TrialKey::kBonafide : TrialKey::kSpoof;
    u.train = speaker < cfg.num_speakers / 2;
    u.audio.sample_rate = cfg.sample_rate;
    u.audio.source_id = id;
    u.audio.samples.assign(leading, 0.0);
    u.audio.samples.insert(u.audio.samples.end(), content.begin(), content.end());
    u.audio.samples.insert(u.audio.samples.end(), trailing, 0.0);
  });
  return out;
}

size_t WriteSynthCorpus(const std::string &dir, const SynthConfig &cfg, int jobs) {
  const std::vector<SynthUtterance> corpus = GenerateSynthCorpus(cfg);
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root / "audio");
  ParallelFor(corpus.size(), jobs, [&](size_t i) {
    WriteAudio((root / "audio" / (corpus[i].entry.utterance + ".wav")).string(), corpus[i].audio);
  });
  Protocol train, dev, all;
  for (const SynthUtterance &u : corpus) {
    (u.train ? train : dev).push_back(u.entry);
    all.push_back(u.entry);
  }
  WriteProtocol((root / "train.txt").string(), train);
  WriteProtocol((root / "dev.txt").string(), dev);
  WriteProtocol((root / "all.txt").string(), all);
  return corpus.size();
}

}  // namespace spoofkit
