// tests/pipeline-test.cc

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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "spoofkit/countermeasure.h"
#include "spoofkit/experiment-config.h"
#include "spoofkit/silence.h"
#include "spoofkit/synth.h"

using namespace spoofkit;

namespace {

IniConfig Ini(const std::string &text) {
  std::istringstream is(text);
  return IniConfig::Parse(is, "test.ini");
}

struct Corpus {
  std::vector<SynthUtterance> utts;
  std::map<std::string, AudioBuffer> audio;
  std::vector<LabelledUtterance> train, test;

  explicit Corpus(const SynthConfig &cfg) : utts(GenerateSynthCorpus(cfg)) {
    for (const SynthUtterance &u : utts) {
      audio[u.entry.utterance] = u.audio;
      (u.train ? train : test).push_back({u.entry.utterance, u.entry.is_bonafide()});
    }
  }
  AudioLoader Loader() const {
    return [this](const std::string &id) { return audio.at(id); };
  }
};

SynthConfig SmallSynth(uint64_t seed, int pairs = 40) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.num_pairs = pairs;
  cfg.num_speakers = 4;
  return cfg;
}

PipelineConfig SmallGmm() {
  PipelineConfig p;
  p.num_components = 4;
  p.em.seed = 3;
  p.em.max_iters = 10;
  return p;
}

size_t TrailingZeros(const AudioBuffer &b) {
  size_t n = 0;
  while (n < b.samples.size() && b.samples[b.samples.size() - 1 - n] == 0.0) ++n;
  return n;
}

}  // namespace

TEST_CASE("synthetic corpus layout") {
  const SynthConfig cfg = SmallSynth(11);
  const std::vector<SynthUtterance> c = GenerateSynthCorpus(cfg);
  REQUIRE(c.size() == 80);
  std::set<std::string> train_spk, dev_spk;
  for (size_t i = 0; i < c.size(); ++i) {
    (c[i].train ? train_spk : dev_spk).insert(c[i].entry.speaker);
    const TrimResult t = TrimSilence(c[i].audio, TrimMode::kBoth);
    CHECK_FALSE(t.full_silence);
    for (double v : t.buffer.samples) REQUIRE(v != 0.0);
    CHECK(c[i].entry.is_bonafide() == (c[i].entry.attack == "-"));
  }
  for (const auto &s : train_spk) CHECK(dev_spk.count(s) == 0);
  // Pairs share the base trailing run; spoof adds the offset.
  for (int i = 0; i < cfg.num_pairs; ++i) {
    const SynthUtterance *b = nullptr, *s = nullptr;
    char id[32];
    std::snprintf(id, sizeof(id), "SYN_B_%05d", i);
    for (const auto &u : c) {
      if (u.entry.utterance == id) b = &u;
      if (u.entry.utterance == "SYN_S_" + std::string(id + 6)) s = &u;
    }
    REQUIRE(b != nullptr);
    REQUIRE(s != nullptr);
    CHECK(TrailingZeros(s->audio) == TrailingZeros(b->audio) + 8000);
    CHECK(TrailingZeros(b->audio) <= 399);
  }
}

TEST_CASE("synthetic corpus is deterministic in the seed") {
  const auto a = GenerateSynthCorpus(SmallSynth(5, 10));
  const auto b = GenerateSynthCorpus(SmallSynth(5, 10));
  const auto c = GenerateSynthCorpus(SmallSynth(6, 10));
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].audio.samples == b[i].audio.samples);
    differs |= a[i].audio.samples != c[i].audio.samples;
  }
  CHECK(differs);
}

TEST_CASE("synthetic corpus without silence has no zero samples") {
  SynthConfig cfg = SmallSynth(2, 10);
  cfg.silence = false;
  for (const auto &u : GenerateSynthCorpus(cfg))
    for (double v : u.audio.samples) REQUIRE(v != 0.0);
}

TEST_CASE("synth section requires a seed") {
  CHECK_THROWS_AS(SynthConfig::FromSection(ConfigSection("synth", {{"num_pairs", "5"}})), Error);
  CHECK(SynthConfig::FromSection(ConfigSection("synth", {{"seed", "4"}})).seed == 4);
  SynthConfig bad = SmallSynth(1);
  bad.num_pairs = 0;
  CHECK_THROWS_AS(bad.Validate(), Error);
}

TEST_CASE("config parsing") {
  CHECK_THROWS_AS(Ini("[nonsense]\na = 1\n"), Error);
  CHECK_THROWS_AS(Ini("a = 1\n[gmm]\n"), Error);
  const IniConfig c = Ini("[gmm]\nseed = 9\nmax_iters = 3\n");
  CHECK(c.HasSection("gmm"));
  CHECK_FALSE(c.HasSection("tv"));
  CHECK(c.Section("tv").values().empty());
  CHECK(EmConfig::FromSection(c.Section("gmm")).max_iters == 3);
  const IniConfig typo = Ini("[gmm]\nseed = 9\nmax_iter = 3\n");
  EmConfig::FromSection(typo.Section("gmm"));
  CHECK_THROWS_AS(typo.CheckUsed({"gmm"}), Error);
  // Canonical form ignores layout.
  CHECK(Ini("[gmm]\nseed=9\n").Canonical() == Ini("; comment\n[gmm]\n  seed = 9  \n").Canonical());
}

TEST_CASE("default config text parses and lists every known section") {
  const IniConfig c = Ini(DefaultConfigText());
  for (const std::string &s : IniConfig::KnownSections()) CHECK(c.HasSection(s));
}

TEST_CASE("environment overrides paths") {
  ::setenv("SPOOFKIT_PATHS_WORK_DIR", "/tmp/from-env", 1);
  const IniConfig c = Ini("[paths]\nwork_dir = /tmp/from-file\n");
  ::unsetenv("SPOOFKIT_PATHS_WORK_DIR");
  CHECK(RequiredPath(c, "work_dir") == "/tmp/from-env");
  CHECK(RequiredPath(Ini("[paths]\nwork_dir = /w\n"), "work_dir") == "/w");
  CHECK_THROWS_AS(RequiredPath(Ini(""), "audio_root"), Error);
}

TEST_CASE("sha256") {
  CHECK(Sha256Hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("pipeline config validation") {
  CHECK(PipelineConfig::FromConfig(Ini("[gmm]\nseed = 1\n")).backend == Backend::kGmm);
  CHECK_THROWS_AS(PipelineConfig::FromConfig(Ini("[pipeline]\nfeatures = lfcc, mfcc\n[gmm]\nseed = 1\n")),
                  Error);
  CHECK_THROWS_AS(PipelineConfig::FromConfig(Ini("[pipeline]\nbackend = ltas-svm\nfeatures = lfcc\n"
                                                 "[svm]\nseed = 1\n")),
                  Error);
  CHECK_THROWS_AS(PipelineConfig::FromConfig(Ini("[features]\nkind = mfcc\n[gmm]\nseed = 1\n")), Error);
  CHECK_THROWS_AS(PipelineConfig::FromConfig(Ini("[pipeline]\nbackend = svm\n")), Error);
  // The seed has no default.
  CHECK_THROWS_AS(PipelineConfig::FromConfig(Ini("[pipeline]\nbackend = gmm\n")), Error);
  const PipelineConfig iv = PipelineConfig::FromConfig(
      Ini("[pipeline]\nbackend = ivector-svm\nfeatures = mfcc, cqcc\njobs = 3\n"
          "[gmm]\nseed = 1\n[tv]\nseed = 2\nrank = 5\n[svm]\nseed = 3\n"));
  REQUIRE(iv.features.size() == 2);
  CHECK(iv.features[1].kind == FeatureKind::kCqcc);
  CHECK(iv.tv.rank == 5);
  CHECK(iv.em.jobs == 3);
  CHECK(iv.tv.jobs == 3);
}

TEST_CASE("mode strings") {
  for (auto m : {InterventionMode::kI, InterventionMode::kII, InterventionMode::kIII})
    CHECK(InterventionModeFromString(ToString(m)) == m);
  CHECK_THROWS_AS(InterventionModeFromString("IV"), Error);
  for (auto b : {Backend::kGmm, Backend::kIvectorSvm, Backend::kLtasSvm})
    CHECK(BackendFromString(ToString(b)) == b);
}

TEST_CASE("interventions are no-ops without silence") {
  SynthConfig cfg = SmallSynth(8);
  cfg.silence = false;
  const Corpus c(cfg);
  const InterventionReport r =
      RunIntervention({InterventionMode::kI, InterventionMode::kII, InterventionMode::kIII}, c.train, c.test,
                      c.Loader(), SmallGmm(), InterventionConfig{}, CostModel{});
  REQUIRE(r.results.size() == 3);
  for (const InterventionResult &m : r.results) {
    CHECK(m.scores == r.baseline_scores);
    CHECK(m.after.eer == r.baseline.eer);
    CHECK_FALSE(m.after.min_tdcf.has_value());
  }
}

TEST_CASE("trimming removes the trailing-silence cue") {
  const Corpus c(SmallSynth(21, 60));
  CostModel cost;
  cost.p_miss_asv = 0.05;
  cost.p_fa_asv = 0.01;
  cost.p_miss_spoof_asv = 0.4;
  const InterventionReport r =
      RunIntervention({InterventionMode::kIII}, c.train, c.test, c.Loader(), SmallGmm(), {}, cost);
  CHECK(r.baseline.eer <= 0.05);
  CHECK(r.results[0].after.eer > r.baseline.eer + 0.2);
  REQUIRE(r.baseline.min_tdcf.has_value());
  std::ostringstream os;
  WriteInterventionTable(os, r);
  CHECK(os.str().find("mode\tt-DCF(before)\tt-DCF(after)\tEER%(before)\tEER%(after)") != std::string::npos);
  CHECK(os.str().find("\nIII\t") != std::string::npos);
}

TEST_CASE("scores do not depend on the number of jobs") {
  const Corpus c(SmallSynth(4, 16));
  PipelineConfig p = SmallGmm();
  std::vector<std::string> ids;
  for (const auto &u : c.test) ids.push_back(u.utterance);
  const auto one = ScoreCountermeasure(TrainCountermeasure(c.train, c.Loader(), p), ids, c.Loader(), 1);
  p.jobs = p.em.jobs = 3;
  const auto three = ScoreCountermeasure(TrainCountermeasure(c.train, c.Loader(), p), ids, c.Loader(), 3);
  CHECK(one == three);
}

TEST_CASE("svm backends train and score") {
  const Corpus c(SmallSynth(9, 16));
  std::vector<std::string> ids;
  for (const auto &u : c.test) ids.push_back(u.utterance);

  PipelineConfig iv;
  iv.backend = Backend::kIvectorSvm;
  iv.features = {FeatureConfig{}, FeatureConfig{}};
  iv.features[1].kind = FeatureKind::kMfcc;
  iv.num_components = 4;
  iv.em.seed = 1;
  iv.em.max_iters = 5;
  iv.tv.rank = 3;
  iv.tv.iters = 3;
  iv.tv.seed = 2;
  const Countermeasure cm = TrainCountermeasure(c.train, c.Loader(), iv);
  CHECK(cm.tv.size() == 2);
  const auto s = ScoreCountermeasure(cm, ids, c.Loader(), 2);
  CHECK(s.size() == ids.size());
  for (double v : s) CHECK(std::isfinite(v));

  PipelineConfig lt;
  lt.backend = Backend::kLtasSvm;
  lt.features[0].kind = FeatureKind::kLtas;
  const auto l = ScoreCountermeasure(TrainCountermeasure(c.train, c.Loader(), lt), ids, c.Loader(), 1);
  CHECK(l.size() == ids.size());
}
