// src/countermeasure.cc

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

#include "spoofkit/countermeasure.h"

#include <atomic>
#include <iomanip>
#include <sstream>

#include "spoofkit/parallel.h"

namespace spoofkit {

std::string ToString(Backend backend) {
  switch (backend) {
    case Backend::kGmm: return "gmm";
    case Backend::kIvectorSvm: return "ivector-svm";
    case Backend::kLtasSvm: return "ltas-svm";
  }
  return "?";
}

Backend BackendFromString(const std::string &name) {
  if (name == "gmm") return Backend::kGmm;
  if (name == "ivector-svm") return Backend::kIvectorSvm;
  if (name == "ltas-svm") return Backend::kLtasSvm;
  throw Error("unknown backend '" + name + "' (expected gmm, ivector-svm or ltas-svm)");
}

void PipelineConfig::Validate() const {
  if (features.empty()) throw Error("pipeline has no feature streams");
  for (const FeatureConfig &f : features) f.Validate();
  if (num_components < 1) throw Error("num_components must be positive");
  if (jobs < 1) throw Error("jobs must be positive");
  switch (backend) {
    case Backend::kGmm:
      if (features.size() != 1) throw Error("the gmm backend takes exactly one feature stream");
      if (features[0].kind == FeatureKind::kLtas)
        throw Error("the gmm backend needs frame-level features, not ltas");
      em.Validate();
      break;
    case Backend::kIvectorSvm:
      for (const FeatureConfig &f : features)
        if (f.kind == FeatureKind::kLtas) throw Error("the ivector-svm backend cannot use ltas");
      em.Validate();
      tv.Validate();
      svm.Validate();
      break;
    case Backend::kLtasSvm:
      if (features.size() != 1 || features[0].kind != FeatureKind::kLtas)
        throw Error("the ltas-svm backend takes the single feature stream 'ltas'");
      svm.Validate();
      break;
  }
}

std::vector<std::string> PipelineConfig::SectionsUsed(Backend backend) {
  switch (backend) {
    case Backend::kGmm: return {"pipeline", "features", "gmm"};
    case Backend::kIvectorSvm: return {"pipeline", "features", "gmm", "tv", "svm"};
    case Backend::kLtasSvm: return {"pipeline", "features", "svm"};
  }
  return {};
}

PipelineConfig PipelineConfig::FromConfig(const IniConfig &config) {
  const ConfigSection &p = config.Section("pipeline");
  PipelineConfig c;
  c.backend = BackendFromString(p.String("backend", ToString(c.backend)));
  c.num_components = p.Int("num_components", c.num_components);
  c.jobs = p.Int("jobs", c.jobs);
  c.features = FeatureStreamsFromConfig(config, c.backend == Backend::kLtasSvm ? "ltas" : "lfcc");
  if (c.backend != Backend::kLtasSvm) c.em = EmConfig::FromSection(config.Section("gmm"));
  if (c.backend == Backend::kIvectorSvm) c.tv = TvConfig::FromSection(config.Section("tv"));
  if (c.backend != Backend::kGmm) c.svm = SvmConfig::FromSection(config.Section("svm"));
  c.em.jobs = c.jobs;
  c.tv.jobs = c.jobs;
  c.Validate();
  return c;
}

std::vector<FeatureConfig> FeatureStreamsFromConfig(const IniConfig &config,
                                                    const std::string &fallback) {
  std::vector<std::string> kinds = config.Section("pipeline").List("features");
  if (kinds.empty()) kinds = {fallback};
  const ConfigSection &f = config.Section("features");
  if (f.Has("kind")) throw Error("[features] kind is set per stream through [pipeline] features");
  std::vector<FeatureConfig> out;
  for (const std::string &kind : kinds) {
    ConfigSection s = f;
    s.Set("kind", kind);
    out.push_back(FeatureConfig::FromSection(s));
  }
  // Mark the shared keys as read on the original section as well.
  FeatureConfig::FromSection(f);
  return out;
}

std::vector<LabelledUtterance> LabelsFromProtocol(const Protocol &protocol) {
  std::vector<LabelledUtterance> out;
  out.reserve(protocol.size());
  for (const TrialEntry &e : protocol) out.push_back({e.utterance, e.is_bonafide()});
  return out;
}

std::vector<std::vector<FeatureMatrix>> ExtractStreams(const std::vector<std::string> &utterances,
                                                       const AudioLoader &load,
                                                       const std::vector<FeatureConfig> &streams,
                                                       int jobs) {
  std::vector<std::vector<FeatureMatrix>> out(streams.size(),
                                              std::vector<FeatureMatrix>(utterances.size()));
  ParallelFor(utterances.size(), jobs, [&](size_t u) {
    const AudioBuffer audio = load(utterances[u]);
    for (size_t s = 0; s < streams.size(); ++s) {
      try {
        out[s][u] = ExtractFeatures(audio, streams[s]);
      } catch (const Error &e) {
        throw Error(utterances[u] + ": " + e.what());
      }
    }
  });
  return out;
}

namespace {

std::vector<std::string> Ids(const std::vector<LabelledUtterance> &items) {
  std::vector<std::string> ids;
  ids.reserve(items.size());
  for (const LabelledUtterance &i : items) ids.push_back(i.utterance);
  return ids;
}

DiagGmm TrainOnFrames(const std::vector<FeatureMatrix> &feats, int k, const EmConfig &em) {
  DiagGmm model = TrainGmm(PoolFrames(feats), k, em).model;
  model.feature_kind = feats.front().kind;
  return model;
}

// Utterance-level vectors, one row per utterance.
Matrix IvectorRows(const std::vector<TvModel> &tv, const std::vector<std::vector<FeatureMatrix>> &feats,
                   int jobs) {
  const size_t n = feats.front().size();
  std::vector<Vector> rows(n);
  ParallelFor(n, jobs, [&](size_t u) {
    std::vector<Vector> parts;
    for (size_t s = 0; s < tv.size(); ++s)
      parts.push_back(ExtractIvector(tv[s], BaumWelchStats(tv[s].ubm, feats[s][u])));
    rows[u] = FuseIvectors(parts);
  });
  Matrix x(n, rows.front().size());
  for (size_t u = 0; u < n; ++u) x.row(u) = rows[u].transpose();
  return x;
}

Matrix LtasRows(const std::vector<FeatureMatrix> &feats) {
  Matrix x(feats.size(), feats.front().dims());
  for (size_t u = 0; u < feats.size(); ++u) {
    if (feats[u].frames() != 1) throw Error("ltas features must have exactly one row");
    x.row(u) = feats[u].data.row(0);
  }
  return x;
}

}  // namespace

Countermeasure TrainCountermeasure(const std::vector<LabelledUtterance> &train, const AudioLoader &load,
                                   const PipelineConfig &cfg) {
  cfg.Validate();
  size_t n_bona = 0;
  for (const LabelledUtterance &t : train) n_bona += t.bonafide;
  if (n_bona == 0 || n_bona == train.size())
    throw Error("training data needs both bonafide and spoof utterances");

  Countermeasure cm;
  cm.backend = cfg.backend;
  cm.features = cfg.features;
  const auto feats = ExtractStreams(Ids(train), load, cfg.features, cfg.jobs);
  std::vector<int> labels;
  for (const LabelledUtterance &t : train) labels.push_back(t.bonafide ? 1 : -1);

  switch (cfg.backend) {
    case Backend::kGmm: {
      std::vector<FeatureMatrix> bona, spoof;
      for (size_t u = 0; u < train.size(); ++u)
        (train[u].bonafide ? bona : spoof).push_back(feats[0][u]);
      cm.bonafide = TrainOnFrames(bona, cfg.num_components, cfg.em);
      cm.spoof = TrainOnFrames(spoof, cfg.num_components, cfg.em);
      break;
    }
    case Backend::kIvectorSvm: {
      // UBM and T are trained on all training utterances, both classes.
      for (size_t s = 0; s < feats.size(); ++s) {
        const DiagGmm ubm = TrainOnFrames(feats[s], cfg.num_components, cfg.em);
        std::vector<SuffStats> stats(train.size());
        ParallelFor(train.size(), cfg.jobs,
                    [&](size_t u) { stats[u] = BaumWelchStats(ubm, feats[s][u]); });
        cm.tv.push_back(TrainTv(ubm, stats, cfg.tv).model);
      }
      cm.svm = TrainLinearSvm(IvectorRows(cm.tv, feats, cfg.jobs), labels, cfg.svm).model;
      break;
    }
    case Backend::kLtasSvm:
      cm.svm = TrainLinearSvm(LtasRows(feats[0]), labels, cfg.svm).model;
      break;
  }
  return cm;
}

std::vector<double> ScoreCountermeasure(const Countermeasure &cm,
                                        const std::vector<std::string> &utterances,
                                        const AudioLoader &load, int jobs) {
  if (utterances.empty()) return {};
  const auto feats = ExtractStreams(utterances, load, cm.features, jobs);
  std::vector<double> scores(utterances.size());
  switch (cm.backend) {
    case Backend::kGmm:
      ParallelFor(utterances.size(), jobs,
                  [&](size_t u) { scores[u] = LlrScore(cm.bonafide, cm.spoof, feats[0][u]); });
      break;
    case Backend::kIvectorSvm: {
      const Matrix x = IvectorRows(cm.tv, feats, jobs);
      for (size_t u = 0; u < utterances.size(); ++u) scores[u] = SvmScore(cm.svm, x.row(u).transpose());
      break;
    }
    case Backend::kLtasSvm: {
      const Matrix x = LtasRows(feats[0]);
      for (size_t u = 0; u < utterances.size(); ++u) scores[u] = SvmScore(cm.svm, x.row(u).transpose());
      break;
    }
  }
  return scores;
}

std::string ToString(InterventionMode mode) {
  switch (mode) {
    case InterventionMode::kI: return "I";
    case InterventionMode::kII: return "II";
    case InterventionMode::kIII: return "III";
  }
  return "?";
}

InterventionMode InterventionModeFromString(const std::string &name) {
  if (name == "I") return InterventionMode::kI;
  if (name == "II") return InterventionMode::kII;
  if (name == "III") return InterventionMode::kIII;
  throw Error("unknown intervention mode '" + name + "' (expected I, II or III)");
}

InterventionConfig InterventionConfig::FromSection(const ConfigSection &s) {
  InterventionConfig c;
  c.trim = TrimModeFromString(s.String("trim", ToString(c.trim)));
  c.epsilon = s.Double("epsilon", c.epsilon);
  if (!(c.epsilon >= 0.0)) throw Error("[intervention] epsilon must be non-negative");
  return c;
}

KeyValueList InterventionConfig::ToKeyValues() const {
  return {{"trim", ToString(trim)}, {"epsilon", FormatDouble(epsilon)}};
}

OperatingMetrics EvaluateScores(const std::vector<double> &scores,
                                const std::vector<LabelledUtterance> &test, const CostModel &cost) {
  if (scores.size() != test.size()) throw Error("score count does not match the test list");
  ScoreSet set;
  for (size_t i = 0; i < scores.size(); ++i)
    (test[i].bonafide ? set.bonafide : set.spoof).push_back(scores[i]);
  OperatingMetrics m;
  m.eer = ComputeEer(set).eer;
  if (cost.HasAsvOperatingPoint()) m.min_tdcf = ComputeMinTdcf(set, cost).min_tdcf;
  return m;
}

InterventionReport RunIntervention(const std::vector<InterventionMode> &modes,
                                   const std::vector<LabelledUtterance> &train,
                                   const std::vector<LabelledUtterance> &test,
                                   const AudioLoader &load, const PipelineConfig &pipeline,
                                   const InterventionConfig &icfg, const CostModel &cost) {
  if (modes.empty()) throw Error("no intervention mode requested");
  if (test.empty()) throw Error("empty test list");
  std::atomic<size_t> silent{0};
  const AudioLoader trimmed = [&](const std::string &utt) {
    TrimResult r = TrimSilence(load(utt), icfg.trim, icfg.epsilon);
    if (r.full_silence) ++silent;
    return std::move(r.buffer);
  };

  InterventionReport report;
  report.n_train = train.size();
  report.n_test = test.size();
  report.test_utterances = Ids(test);
  const Countermeasure base = TrainCountermeasure(train, load, pipeline);
  report.baseline_scores = ScoreCountermeasure(base, report.test_utterances, load, pipeline.jobs);
  report.baseline = EvaluateScores(report.baseline_scores, test, cost);

  std::optional<Countermeasure> retrained;
  size_t silent_train = 0;
  for (InterventionMode mode : modes) {
    InterventionResult r;
    r.mode = mode;
    const Countermeasure *model = &base;
    if (mode != InterventionMode::kI) {
      if (!retrained) {
        silent = 0;
        retrained = TrainCountermeasure(train, trimmed, pipeline);
        silent_train = silent;
      }
      model = &*retrained;
      r.full_silence_train = silent_train;
    }
    silent = 0;
    const bool trim_test = mode != InterventionMode::kII;
    r.scores = ScoreCountermeasure(*model, report.test_utterances, trim_test ? trimmed : load,
                                   pipeline.jobs);
    r.full_silence_test = trim_test ? silent.load() : 0;
    r.after = EvaluateScores(r.scores, test, cost);
    report.results.push_back(std::move(r));
  }
  return report;
}

void WriteInterventionTable(std::ostream &os, const InterventionReport &report) {
  auto tdcf = [](const OperatingMetrics &m) {
    if (!m.min_tdcf) return std::string("n/a");
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << *m.min_tdcf;
    return s.str();
  };
  auto eer = [](const OperatingMetrics &m) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << 100.0 * m.eer;
    return s.str();
  };
  os << "# train=" << report.n_train << " test=" << report.n_test << '\n';
  os << "mode\tt-DCF(before)\tt-DCF(after)\tEER%(before)\tEER%(after)\n";
  for (const InterventionResult &r : report.results) {
    os << ToString(r.mode) << '\t' << tdcf(report.baseline) << '\t' << tdcf(r.after) << '\t'
       << eer(report.baseline) << '\t' << eer(r.after) << '\n';
  }
}

}  // namespace spoofkit
