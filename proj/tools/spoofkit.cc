// tools/spoofkit.cc

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

// spoofkit: command-line front end.  Every subcommand writes a JSON run
// manifest next to its outputs; on failure the outputs written so far are
// removed, a single "error: ..." line goes to stderr and the exit code is 1.
// Usage errors exit with 2.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "run-context.h"
#include "spoofkit/countermeasure.h"
#include "spoofkit/feature-io.h"
#include "spoofkit/fusion.h"
#include "spoofkit/metrics.h"
#include "spoofkit/parallel.h"
#include "spoofkit/silence.h"
#include "spoofkit/synth.h"

namespace fs = std::filesystem;
using namespace spoofkit;

namespace {

std::string Join(const fs::path &a, const std::string &b) { return (a / b).string(); }

std::string Fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string PathOr(const RunContext &run, const std::string &given, const std::string &key) {
  if (!given.empty()) return given;
  return RequiredPath(run.config(), key);
}

AudioLoader MakeLoader(const std::string &root) {
  return [root](const std::string &utt) { return ReadAudio(ResolveAudioPath(root, utt)); };
}

std::vector<std::string> ProtocolIds(const Protocol &p) {
  std::vector<std::string> ids;
  for (const TrialEntry &e : p) ids.push_back(e.utterance);
  return ids;
}

// Reads an scp and, optionally, keeps only (and all of) the given ids.
ScpEntries LoadScp(RunContext &run, const std::string &path) {
  run.Input(path);
  ScpEntries entries = ReadScp(path);
  std::set<std::string> keep;
  for (const std::string &id : run.FilterIds([&] {
         std::vector<std::string> ids;
         for (const auto &e : entries) ids.push_back(e.first);
         return ids;
       }()))
    keep.insert(id);
  ScpEntries out;
  for (auto &e : entries)
    if (keep.count(e.first)) out.push_back(std::move(e));
  if (out.empty()) throw Error(path + ": no entries left after the subset filter");
  return out;
}

std::map<std::string, std::string> ScpMap(const ScpEntries &entries) {
  std::map<std::string, std::string> m;
  for (const auto &[id, path] : entries) m[id] = path;
  return m;
}

// Features for `ids` from one scp, in order.
std::vector<FeatureMatrix> FeaturesFor(const std::vector<std::string> &ids, const ScpEntries &scp,
                                       int jobs) {
  const auto map = ScpMap(scp);
  std::vector<FeatureMatrix> out(ids.size());
  ParallelFor(ids.size(), jobs, [&](size_t i) {
    auto it = map.find(ids[i]);
    if (it == map.end()) throw Error("no features for utterance " + ids[i]);
    out[i] = ReadFeatures(it->second);
  });
  return out;
}

// One row per id: the single row of each scp's feature, concatenated.
Matrix VectorRows(const std::vector<std::string> &ids, const std::vector<ScpEntries> &scps, int jobs) {
  std::vector<std::vector<FeatureMatrix>> parts;
  for (const ScpEntries &scp : scps) parts.push_back(FeaturesFor(ids, scp, jobs));
  Eigen::Index dims = 0;
  for (const auto &p : parts) {
    if (p.front().frames() != 1) throw Error("utterance-level features (one row) expected");
    dims += p.front().dims();
  }
  Matrix x(ids.size(), dims);
  for (size_t i = 0; i < ids.size(); ++i) {
    Eigen::Index col = 0;
    for (const auto &p : parts) {
      if (p[i].frames() != 1 || col + p[i].dims() > dims)
        throw Error(ids[i] + ": inconsistent utterance-level feature shape");
      x.row(i).segment(col, p[i].dims()) = p[i].data.row(0);
      col += p[i].dims();
    }
  }
  return x;
}

std::vector<std::string> ScpIds(const ScpEntries &scp) {
  std::vector<std::string> ids;
  for (const auto &e : scp) ids.push_back(e.first);
  return ids;
}

// "id=path" pairs for the fusion commands.
std::vector<std::pair<std::string, std::string>> ParseScoreArgs(const std::vector<std::string> &args) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  for (const std::string &a : args) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == a.size())
      throw UsageError("--scores expects ID=PATH, got '" + a + "'");
    const std::string id = a.substr(0, eq);
    if (!seen.insert(id).second) throw UsageError("score id '" + id + "' given twice");
    out.emplace_back(id, a.substr(eq + 1));
  }
  return out;
}

// Score matrix aligned to `ids`; missing scores are errors.
Matrix ScoreColumns(RunContext &run, const std::vector<std::string> &ids,
                    const std::vector<std::pair<std::string, std::string>> &inputs) {
  Matrix x(ids.size(), inputs.size());
  for (size_t c = 0; c < inputs.size(); ++c) {
    run.Input(inputs[c].second);
    std::map<std::string, double> m;
    for (const ScoreRecord &r : ReadScores(inputs[c].second)) m[r.utterance] = r.score;
    for (size_t i = 0; i < ids.size(); ++i) {
      auto it = m.find(ids[i]);
      if (it == m.end())
        throw Error("score file for '" + inputs[c].first + "' has no score for " + ids[i]);
      x(i, c) = it->second;
    }
  }
  return x;
}

void WriteScoreFile(RunContext &run, const std::string &path, const std::vector<std::string> &ids,
                    const std::vector<double> &scores) {
  std::vector<ScoreRecord> records;
  for (size_t i = 0; i < ids.size(); ++i) records.push_back({ids[i], scores[i]});
  WriteScores(run.Output(path), records);
}

// ---------------------------------------------------------------------------

struct Args {
  CommonOptions common;
  std::string protocol, train_protocol, test_protocol, dev_protocol;
  std::string audio_root, out, out_dir, model, ubm, tv, svm, gmm_bonafide, gmm_spoof, sweep;
  std::vector<std::string> scps, scores, modes;
  std::string preset, trim = "trailing";
  int num_components = 0;
  uint64_t seed = 0;
  bool seed_given = false, no_silence = false;
  int pairs = 0;
};

int CmdPartition(RunContext &run, const Args &a) {
  const std::string train_path = PathOr(run, a.train_protocol, "train_protocol");
  const std::string dev_path = PathOr(run, a.dev_protocol, "dev_protocol");
  const PartitionSpec spec = PartitionSpec::FromSection(run.config().Section("partition"));
  run.config().CheckUsed({"partition"});
  run.Input(train_path);
  run.Input(dev_path);
  const Partition part = PartitionDataset(ParseProtocol(train_path), ParseProtocol(dev_path), spec);
  const fs::path dir = a.out_dir.empty() ? fs::path(RequiredPath(run.config(), "work_dir")) / "partition"
                                         : fs::path(a.out_dir);
  run.OutputDir(dir.string());
  WritePartitionManifest(run.Output(Join(dir, "manifest.csv")), part);
  WritePartitionCounts(run.Output(Join(dir, "counts.csv")), part);
  WriteProtocol(run.Output(Join(dir, "train_tr.txt")), part.train_tr);
  WriteProtocol(run.Output(Join(dir, "dev_es.txt")), part.dev_es);
  WriteProtocol(run.Output(Join(dir, "dev_lr.txt")), part.dev_lr);
  std::cout << "train_tr " << part.train_tr.size() << "\ndev_es " << part.dev_es.size()
            << "\ndev_lr " << part.dev_lr.size() << '\n';
  run.Finish(Join(dir, "manifest.json"));
  return 0;
}

int CmdExtract(RunContext &run, const Args &a) {
  const Protocol protocol = run.LoadProtocol(PathOr(run, a.protocol, "train_protocol"));
  const std::string root = PathOr(run, a.audio_root, "audio_root");
  const auto streams = FeatureStreamsFromConfig(run.config());
  run.config().CheckUsed({"features"});
  const std::vector<std::string> ids = ProtocolIds(protocol);
  const fs::path dir(a.out_dir);
  run.OutputDir(dir.string());
  const auto feats = ExtractStreams(ids, MakeLoader(root), streams, run.Jobs());
  for (size_t s = 0; s < streams.size(); ++s) {
    const std::string kind = ToString(streams[s].kind);
    run.OutputDir(Join(dir, kind));
    ScpEntries scp;
    for (size_t u = 0; u < ids.size(); ++u) {
      const std::string path = run.Output(Join(dir / kind, ids[u] + ".feat"));
      WriteFeatures(path, feats[s][u]);
      scp.emplace_back(ids[u], path);
    }
    WriteScp(run.Output(Join(dir, kind + ".scp")), scp);
    std::cout << kind << ": " << ids.size() << " utterances, " << feats[s][0].dims() << " dims\n";
  }
  run.Finish(Join(dir, "manifest.json"));
  return 0;
}

int NumComponents(const RunContext &run, const Args &a) {
  if (a.num_components > 0) return a.num_components;
  const int k = run.config().Section("pipeline").Int("num_components", PipelineConfig{}.num_components);
  if (k < 1) throw Error("[pipeline] num_components must be positive");
  return k;
}

EmConfig EmFromConfig(RunContext &run) {
  EmConfig em = EmConfig::FromSection(run.config().Section("gmm"));
  em.jobs = run.Jobs();
  run.config().CheckUsed({"gmm"});
  return em;
}

int CmdTrainGmm(RunContext &run, const Args &a) {
  const Protocol protocol = run.LoadProtocol(PathOr(run, a.protocol, "train_protocol"));
  const EmConfig em = EmFromConfig(run);
  const int k = NumComponents(run, a);
  const ScpEntries scp = LoadScp(run, a.scps.at(0));
  std::vector<std::string> bona, spoof;
  for (const TrialEntry &e : protocol) (e.is_bonafide() ? bona : spoof).push_back(e.utterance);
  if (bona.empty() || spoof.empty()) throw Error("train-gmm needs both bonafide and spoof rows");
  const fs::path dir(a.out_dir);
  run.OutputDir(dir.string());
  for (const auto &[name, ids] : {std::pair{"bonafide", bona}, std::pair{"spoof", spoof}}) {
    const std::vector<FeatureMatrix> feats = FeaturesFor(ids, scp, run.Jobs());
    EmResult r = TrainGmm(PoolFrames(feats), k, em);
    r.model.feature_kind = feats.front().kind;
    WriteGmm(run.Output(Join(dir, std::string(name) + ".gmm")), r.model);
    std::cout << name << ": " << ids.size() << " utterances, " << r.iterations
              << " EM iterations, avg log-likelihood " << Fixed(r.trace.back(), 4) << '\n';
  }
  run.Finish(Join(dir, "manifest.json"));
  return 0;
}

int CmdTrainUbm(RunContext &run, const Args &a) {
  const EmConfig em = EmFromConfig(run);
  const int k = NumComponents(run, a);
  const ScpEntries scp = LoadScp(run, a.scps.at(0));
  std::vector<std::string> ids = ScpIds(scp);
  if (!a.protocol.empty()) ids = ProtocolIds(run.LoadProtocol(a.protocol));
  const std::vector<FeatureMatrix> feats = FeaturesFor(ids, scp, run.Jobs());
  EmResult r = TrainGmm(PoolFrames(feats), k, em);
  r.model.feature_kind = feats.front().kind;
  WriteGmm(run.Output(a.out), r.model);
  std::cout << "ubm: " << ids.size() << " utterances, " << r.iterations << " EM iterations\n";
  run.Finish(a.out + ".manifest.json");
  return 0;
}

std::vector<SuffStats> StatsFor(const DiagGmm &ubm, const std::vector<FeatureMatrix> &feats, int jobs) {
  std::vector<SuffStats> stats(feats.size());
  ParallelFor(feats.size(), jobs, [&](size_t u) { stats[u] = BaumWelchStats(ubm, feats[u]); });
  return stats;
}

int CmdTrainTv(RunContext &run, const Args &a) {
  TvConfig cfg = TvConfig::FromSection(run.config().Section("tv"));
  cfg.jobs = run.Jobs();
  run.config().CheckUsed({"tv"});
  run.Input(a.ubm);
  const DiagGmm ubm = ReadGmm(a.ubm);
  const ScpEntries scp = LoadScp(run, a.scps.at(0));
  std::vector<std::string> ids = ScpIds(scp);
  if (!a.protocol.empty()) ids = ProtocolIds(run.LoadProtocol(a.protocol));
  const auto stats = StatsFor(ubm, FeaturesFor(ids, scp, run.Jobs()), run.Jobs());
  const TvTrainResult r = TrainTv(ubm, stats, cfg);
  WriteTv(run.Output(a.out), r.model);
  std::cout << "tv: rank " << r.model.rank() << ", objective " << Fixed(r.trace.front(), 4) << " -> "
            << Fixed(r.trace.back(), 4) << '\n';
  run.Finish(a.out + ".manifest.json");
  return 0;
}

int CmdExtractIvectors(RunContext &run, const Args &a) {
  run.Input(a.tv);
  const TvModel tv = ReadTv(a.tv);
  const ScpEntries scp = LoadScp(run, a.scps.at(0));
  const std::vector<std::string> ids = ScpIds(scp);
  const auto feats = FeaturesFor(ids, scp, run.Jobs());
  const fs::path dir(a.out_dir);
  run.OutputDir(dir.string());
  run.OutputDir(Join(dir, "ivectors"));
  std::vector<FeatureMatrix> ivecs(ids.size());
  ParallelFor(ids.size(), run.Jobs(), [&](size_t u) {
    const Vector w = ExtractIvector(tv, BaumWelchStats(tv.ubm, feats[u]));
    ivecs[u].data = w.transpose();
    ivecs[u].kind = "ivector-" + tv.ubm.feature_kind;
    ivecs[u].n_static = static_cast<int>(w.size());
  });
  ScpEntries out;
  for (size_t u = 0; u < ids.size(); ++u) {
    const std::string path = run.Output(Join(dir / "ivectors", ids[u] + ".feat"));
    WriteFeatures(path, ivecs[u]);
    out.emplace_back(ids[u], path);
  }
  WriteScp(run.Output(Join(dir, "ivectors.scp")), out);
  std::cout << "ivectors: " << ids.size() << " x " << tv.rank() << '\n';
  run.Finish(Join(dir, "manifest.json"));
  return 0;
}

int CmdTrainSvm(RunContext &run, const Args &a) {
  const Protocol protocol = run.LoadProtocol(PathOr(run, a.protocol, "train_protocol"));
  const SvmConfig cfg = SvmConfig::FromSection(run.config().Section("svm"));
  run.config().CheckUsed({"svm"});
  std::vector<ScpEntries> scps;
  for (const std::string &p : a.scps) scps.push_back(LoadScp(run, p));
  const std::vector<std::string> ids = ProtocolIds(protocol);
  std::vector<int> y;
  for (const TrialEntry &e : protocol) y.push_back(e.is_bonafide() ? 1 : -1);
  const SvmTrainResult r = TrainLinearSvm(VectorRows(ids, scps, run.Jobs()), y, cfg);
  std::string tag;
  for (const ScpEntries &scp : scps) {
    const std::string kind = ReadFeatures(scp.front().second).kind;
    tag += (tag.empty() ? "" : "+") + kind;
  }
  WriteSvm(run.Output(a.out), r.model, tag);
  std::cout << "svm: " << ids.size() << " rows, " << r.model.dim() << " dims, " << r.epochs
            << " epochs, objective " << Fixed(r.best_objective.back(), 6) << '\n';
  run.Finish(a.out + ".manifest.json");
  return 0;
}

int CmdScore(RunContext &run, const Args &a) {
  std::vector<ScpEntries> scps;
  for (const std::string &p : a.scps) scps.push_back(LoadScp(run, p));
  std::vector<std::string> ids = ScpIds(scps.front());
  if (!a.protocol.empty()) ids = ProtocolIds(run.LoadProtocol(a.protocol));
  std::vector<double> scores(ids.size());
  if (!a.svm.empty()) {
    run.Input(a.svm);
    const SvmModel model = ReadSvm(a.svm);
    const Matrix x = VectorRows(ids, scps, run.Jobs());
    for (size_t i = 0; i < ids.size(); ++i) scores[i] = SvmScore(model, x.row(i).transpose());
  } else {
    if (a.gmm_bonafide.empty() || a.gmm_spoof.empty())
      throw UsageError("score needs --svm, or both --gmm-bonafide and --gmm-spoof");
    if (scps.size() != 1) throw UsageError("GMM scoring takes exactly one --scp");
    run.Input(a.gmm_bonafide);
    run.Input(a.gmm_spoof);
    const DiagGmm bona = ReadGmm(a.gmm_bonafide), spoof = ReadGmm(a.gmm_spoof);
    const auto feats = FeaturesFor(ids, scps.front(), run.Jobs());
    ParallelFor(ids.size(), run.Jobs(), [&](size_t i) { scores[i] = LlrScore(bona, spoof, feats[i]); });
  }
  WriteScoreFile(run, a.out, ids, scores);
  std::cout << "scored " << ids.size() << " utterances\n";
  run.Finish(a.out + ".manifest.json");
  return 0;
}

std::vector<std::pair<std::string, std::string>> FusionInputs(RunContext &run, const Args &a) {
  auto inputs = ParseScoreArgs(a.scores);
  if (!a.preset.empty()) {
    const std::string task = run.config().Section("experiment").String("task", "PA");
    run.config().CheckUsed({"experiment"});
    const auto &presets = EnsemblePresets(task);
    auto it = presets.find(a.preset);
    if (it == presets.end()) throw UsageError("unknown ensemble preset '" + a.preset + "' for " + task);
    std::map<std::string, std::string> given(inputs.begin(), inputs.end());
    std::vector<std::pair<std::string, std::string>> ordered;
    for (const std::string &id : it->second) {
      auto g = given.find(id);
      if (g == given.end()) throw Error("preset " + a.preset + " needs scores for model " + id);
      ordered.emplace_back(id, g->second);
    }
    if (ordered.size() != inputs.size())
      Warn("scores outside preset " + a.preset + " are ignored");
    inputs = ordered;
  }
  if (inputs.empty()) throw UsageError("no --scores given");
  return inputs;
}

int CmdFuseTrain(RunContext &run, const Args &a) {
  const Protocol protocol = run.LoadProtocol(PathOr(run, a.protocol, "dev_protocol"));
  const FusionConfig cfg = FusionConfig::FromSection(run.config().Section("fusion"));
  run.config().CheckUsed({"fusion"});
  const auto inputs = FusionInputs(run, a);
  const std::vector<std::string> ids = ProtocolIds(protocol);
  std::vector<int> labels;
  for (const TrialEntry &e : protocol) labels.push_back(e.is_bonafide() ? 1 : 0);
  std::vector<std::string> names;
  for (const auto &in : inputs) names.push_back(in.first);
  const FusionTrainResult r = TrainFusion(ScoreColumns(run, ids, inputs), labels, names, cfg);
  WriteFusionModel(run.Output(a.out), r.model);
  std::cout << "fusion: " << names.size() << " inputs, loss " << Fixed(r.initial_loss, 6) << " -> "
            << Fixed(r.final_loss, 6) << " in " << r.iterations << " iterations\n";
  run.Finish(a.out + ".manifest.json");
  return 0;
}

int CmdFuseApply(RunContext &run, const Args &a) {
  run.Input(a.model);
  const FusionModel model = ReadFusionModel(a.model);
  const auto inputs = ParseScoreArgs(a.scores);
  std::vector<std::string> names;
  for (const auto &in : inputs) names.push_back(in.first);
  std::vector<std::string> ids;
  if (!a.protocol.empty()) {
    ids = ProtocolIds(run.LoadProtocol(a.protocol));
  } else {
    run.Input(inputs.front().second);
    for (const ScoreRecord &r : ReadScores(inputs.front().second)) ids.push_back(r.utterance);
    ids = run.FilterIds(ids);
  }
  const Matrix x = ScoreColumns(run, ids, inputs);
  std::vector<double> fused(ids.size());
  for (size_t i = 0; i < ids.size(); ++i)
    fused[i] = ApplyFusion(model, AlignRow(model, names, x.row(i).transpose()));
  WriteScoreFile(run, a.out, ids, fused);
  std::cout << "fused " << ids.size() << " utterances\n";
  run.Finish(a.out + ".manifest.json");
  return 0;
}

CostModel CostFromConfig(RunContext &run) {
  const CostModel cost = CostModel::FromSection(run.config().Section("cost"));
  run.config().CheckUsed({"cost"});
  return cost;
}

int CmdEvaluate(RunContext &run, const Args &a) {
  const Protocol protocol = run.LoadProtocol(PathOr(run, a.protocol, "dev_protocol"));
  const CostModel cost = CostFromConfig(run);
  run.Input(a.scores.at(0));
  const ScoreSet set = JoinScores(protocol, ReadScores(a.scores.at(0)));
  const EerResult eer = ComputeEer(set);
  std::cout << "bonafide trials: " << set.bonafide.size() << '\n'
            << "spoof trials: " << set.spoof.size() << '\n'
            << "EER: " << Fixed(100.0 * eer.eer, 2) << "%\n"
            << "EER threshold: " << FormatDouble(eer.threshold) << '\n';
  std::optional<TdcfCoefficients> coef;
  if (cost.HasAsvOperatingPoint()) {
    coef = ComputeTdcfCoefficients(cost);
    const MinTdcfResult t = ComputeMinTdcf(set, cost);
    std::cout << "min t-DCF: " << Fixed(t.min_tdcf, 4) << '\n'
              << "min t-DCF threshold: " << FormatDouble(t.threshold) << '\n';
  } else {
    std::cout << "min t-DCF: n/a (set p_miss_asv, p_fa_asv and p_miss_spoof_asv in [cost])\n";
  }
  std::cout << "cost model:";
  for (const auto &[k, v] : cost.ToKeyValues()) std::cout << ' ' << k << '=' << (v.empty() ? "unset" : v);
  std::cout << '\n';
  if (!a.sweep.empty()) {
    WriteSweepCsv(run.Output(a.sweep), ThresholdSweep(set, coef));
    run.Finish(a.sweep + ".manifest.json");
  }
  return 0;
}

int CmdAuditSilence(RunContext &run, const Args &a) {
  const Protocol protocol = run.LoadProtocol(PathOr(run, a.protocol, "train_protocol"));
  const std::string root = PathOr(run, a.audio_root, "audio_root");
  SilenceReportConfig cfg = SilenceReportConfig::FromSection(run.config().Section("silence"));
  run.config().CheckUsed({"silence"});
  cfg.jobs = run.Jobs();
  const SilenceReport report = BuildSilenceReport(
      protocol, [&root](const std::string &u) { return ResolveAudioPath(root, u); }, cfg);
  const fs::path dir(a.out_dir);
  run.OutputDir(dir.string());
  WriteSilenceSummaryCsv(run.Output(Join(dir, "silence_summary.csv")), report);
  WriteSilenceProfilesCsv(run.Output(Join(dir, "silence_profiles.csv")), report);
  for (const SilenceGroup &g : report.groups)
    if (g.group_type == "class")
      std::cout << g.group << ": n=" << g.count << " trailing median "
                << FormatDouble(g.trailing_samples.median) << " samples, leading median "
                << FormatDouble(g.leading_samples.median) << " samples\n";
  if (!report.missing.empty()) std::cout << "missing files: " << report.missing.size() << " (partial report)\n";
  std::cout << "horse warning: " << (report.horse_warning ? "yes" : "no") << '\n';
  run.Finish(Join(dir, "manifest.json"));
  return 0;
}

int CmdTrim(RunContext &run, const Args &a) {
  const Protocol protocol = run.LoadProtocol(PathOr(run, a.protocol, "train_protocol"));
  const std::string root = PathOr(run, a.audio_root, "audio_root");
  const TrimMode mode = TrimModeFromString(a.trim);
  const double eps = run.config().Section("silence").Double("epsilon", 0.0);
  const fs::path dir(a.out_dir);
  run.OutputDir(dir.string());
  std::vector<std::string> paths(protocol.size());
  for (size_t i = 0; i < protocol.size(); ++i)
    paths[i] = run.Output(Join(dir, protocol[i].utterance + ".wav"));
  std::vector<char> silent(protocol.size(), 0);
  ParallelFor(protocol.size(), run.Jobs(), [&](size_t i) {
    const TrimResult r = TrimSilence(ReadAudio(ResolveAudioPath(root, protocol[i].utterance)), mode, eps);
    silent[i] = r.full_silence;
    WriteAudio(paths[i], r.buffer);
  });
  std::ofstream fl(run.Output(Join(dir, "full_silence.txt")));
  size_t n_silent = 0;
  for (size_t i = 0; i < protocol.size(); ++i)
    if (silent[i]) {
      fl << protocol[i].utterance << '\n';
      ++n_silent;
    }
  fl.close();
  std::cout << "trimmed " << protocol.size() << " files (" << ToString(mode) << "), " << n_silent
            << " fully silent\n";
  run.Finish(Join(dir, "manifest.json"));
  return 0;
}

int CmdIntervene(RunContext &run, const Args &a) {
  const PipelineConfig pipeline = [&] {
    PipelineConfig p = PipelineConfig::FromConfig(run.config());
    p.jobs = run.Jobs();
    p.em.jobs = p.tv.jobs = p.jobs;
    run.config().CheckUsed(PipelineConfig::SectionsUsed(p.backend));
    return p;
  }();
  const InterventionConfig icfg = InterventionConfig::FromSection(run.config().Section("intervention"));
  run.config().CheckUsed({"intervention"});
  const CostModel cost = CostFromConfig(run);
  std::vector<InterventionMode> modes;
  for (std::string m : a.modes) {
    std::replace(m.begin(), m.end(), ',', ' ');
    std::istringstream is(m);
    std::string tok;
    while (is >> tok) modes.push_back(InterventionModeFromString(tok));
  }
  if (modes.empty()) throw UsageError("--mode is required");
  const Protocol train = run.LoadProtocol(PathOr(run, a.train_protocol, "train_protocol"));
  const Protocol test = run.LoadProtocol(PathOr(run, a.test_protocol, "dev_protocol"));
  const std::string root = PathOr(run, a.audio_root, "audio_root");
  const InterventionReport report = RunIntervention(modes, LabelsFromProtocol(train),
                                                    LabelsFromProtocol(test), MakeLoader(root),
                                                    pipeline, icfg, cost);
  WriteInterventionTable(std::cout, report);
  const fs::path dir(a.out_dir);
  run.OutputDir(dir.string());
  {
    std::ofstream os(run.Output(Join(dir, "intervention.tsv")));
    WriteInterventionTable(os, report);
  }
  WriteScoreFile(run, Join(dir, "scores_baseline.txt"), report.test_utterances, report.baseline_scores);
  for (const InterventionResult &r : report.results)
    WriteScoreFile(run, Join(dir, "scores_" + ToString(r.mode) + ".txt"), report.test_utterances, r.scores);
  run.Finish(Join(dir, "manifest.json"));
  return 0;
}

int CmdSynthCorpus(RunContext &run, const Args &a) {
  SynthConfig cfg;
  if (run.config().HasSection("synth") || !a.seed_given) {
    cfg = SynthConfig::FromSection(run.config().Section("synth"));
    run.config().CheckUsed({"synth"});
  }
  if (a.seed_given) cfg.seed = a.seed;
  if (a.pairs > 0) cfg.num_pairs = a.pairs;
  if (a.no_silence) cfg.silence = false;
  cfg.Validate();
  run.Seed("synth", cfg.seed);
  const fs::path dir(a.out_dir);
  run.OutputDir(dir.string());
  // Register every file up front so that a failure removes all of them.
  for (const char *p : {"train.txt", "dev.txt", "all.txt"}) run.Output(Join(dir, p));
  run.OutputDir(Join(dir, "audio"));
  const size_t n = WriteSynthCorpus(dir.string(), cfg, run.Jobs());
  std::cout << "wrote " << n << " utterances to " << Join(dir, "audio") << '\n';
  run.Finish(Join(dir, "manifest.json"));
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"spoofkit: anti-spoofing countermeasure toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kSpoofkitVersion);
  bool dump_config = false;
  app.add_flag("--dump-config", dump_config, "Print the default config and exit");
  Args a;
  std::string command;

  auto add_common = [&](CLI::App *sub) {
    sub->add_option("-c,--config", a.common.config_path, "INI experiment config")->check(CLI::ExistingFile);
    sub->add_option("-j,--jobs", a.common.jobs, "Parallel jobs (results do not depend on it)");
    sub->add_option("--subset", a.common.subset, "Restrict to train_tr, dev_es or dev_lr");
    sub->add_option("--partition-manifest", a.common.partition_manifest,
                    "Partition manifest for --subset (default <work_dir>/partition/manifest.csv)");
    sub->callback([&command, sub] { command = sub->get_name(); });
  };
  auto sub = [&](const std::string &name, const std::string &help) {
    CLI::App *s = app.add_subcommand(name, help);
    add_common(s);
    return s;
  };

  CLI::App *s;
  s = sub("partition", "Split train/dev protocols into train_tr, dev_es and dev_lr");
  s->add_option("--train-protocol", a.train_protocol);
  s->add_option("--dev-protocol", a.dev_protocol);
  s->add_option("--out-dir", a.out_dir, "Default <work_dir>/partition");

  s = sub("extract", "Extract feature streams for a protocol");
  s->add_option("--protocol", a.protocol);
  s->add_option("--audio-root", a.audio_root);
  s->add_option("--out-dir", a.out_dir)->required();

  s = sub("train-gmm", "Train bonafide and spoof GMMs");
  s->add_option("--protocol", a.protocol);
  s->add_option("--scp", a.scps)->required();
  s->add_option("--num-components", a.num_components);
  s->add_option("--out-dir", a.out_dir)->required();

  s = sub("train-ubm", "Train a UBM on pooled frames");
  s->add_option("--protocol", a.protocol, "Restrict to these utterances");
  s->add_option("--scp", a.scps)->required();
  s->add_option("--num-components", a.num_components);
  s->add_option("--out", a.out)->required();

  s = sub("train-tv", "Train a total-variability matrix");
  s->add_option("--ubm", a.ubm)->required();
  s->add_option("--protocol", a.protocol, "Restrict to these utterances");
  s->add_option("--scp", a.scps)->required();
  s->add_option("--out", a.out)->required();

  s = sub("extract-ivectors", "Extract i-vectors");
  s->add_option("--tv", a.tv)->required();
  s->add_option("--scp", a.scps)->required();
  s->add_option("--out-dir", a.out_dir)->required();

  s = sub("train-svm", "Train a linear SVM on utterance-level vectors (repeat --scp to concatenate)");
  s->add_option("--protocol", a.protocol);
  s->add_option("--scp", a.scps)->required();
  s->add_option("--out", a.out)->required();

  s = sub("score", "Score utterances with a GMM pair or an SVM");
  s->add_option("--protocol", a.protocol, "Restrict and order by this protocol");
  s->add_option("--scp", a.scps)->required();
  s->add_option("--gmm-bonafide", a.gmm_bonafide);
  s->add_option("--gmm-spoof", a.gmm_spoof);
  s->add_option("--svm", a.svm);
  s->add_option("--out", a.out)->required();

  s = sub("fuse-train", "Train logistic-regression fusion");
  s->add_option("--protocol", a.protocol);
  s->add_option("--scores", a.scores, "ID=PATH, repeatable")->required();
  s->add_option("--preset", a.preset, "E1, E2 or E3 for [experiment] task");
  s->add_option("--out", a.out)->required();

  s = sub("fuse-apply", "Apply a fusion model");
  s->add_option("--model", a.model)->required();
  s->add_option("--scores", a.scores, "ID=PATH, repeatable")->required();
  s->add_option("--protocol", a.protocol);
  s->add_option("--out", a.out)->required();

  s = sub("evaluate", "EER and min t-DCF of a score file");
  s->add_option("--protocol", a.protocol);
  s->add_option("--scores", a.scores)->required()->expected(1);
  s->add_option("--sweep", a.sweep, "Write the threshold sweep CSV here");

  s = sub("audit-silence", "Leading/trailing zero-run report");
  s->add_option("--protocol", a.protocol);
  s->add_option("--audio-root", a.audio_root);
  s->add_option("--out-dir", a.out_dir)->required();

  s = sub("trim", "Write silence-trimmed copies of the audio");
  s->add_option("--protocol", a.protocol);
  s->add_option("--audio-root", a.audio_root);
  s->add_option("--mode", a.trim, "leading | trailing | both");
  s->add_option("--out-dir", a.out_dir)->required();

  s = sub("intervene", "Baseline vs. silence-trimmed train/test (modes I, II, III)");
  s->add_option("--mode", a.modes, "I, II or III; repeat or comma-separate")->required();
  s->add_option("--pipeline", a.common.config_path, "Alias of --config")->check(CLI::ExistingFile);
  s->add_option("--train-protocol", a.train_protocol);
  s->add_option("--test-protocol", a.test_protocol);
  s->add_option("--audio-root", a.audio_root);
  s->add_option("--out-dir", a.out_dir)->required();

  s = sub("synth-corpus", "Generate the synthetic trailing-silence corpus");
  s->add_option("--out-dir", a.out_dir)->required();
  s->add_option("--seed", a.seed)->each([&a](const std::string &) { a.seed_given = true; });
  s->add_option("--pairs", a.pairs, "Bonafide/spoof pairs (default 500)");
  s->add_flag("--no-silence", a.no_silence, "No leading or trailing zeros at all");

  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--dump-config") {
      std::cout << DefaultConfigText();
      return 0;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  static const std::map<std::string, int (*)(RunContext &, const Args &)> kCommands = {
      {"partition", CmdPartition},
      {"extract", CmdExtract},
      {"train-gmm", CmdTrainGmm},
      {"train-ubm", CmdTrainUbm},
      {"train-tv", CmdTrainTv},
      {"extract-ivectors", CmdExtractIvectors},
      {"train-svm", CmdTrainSvm},
      {"score", CmdScore},
      {"fuse-train", CmdFuseTrain},
      {"fuse-apply", CmdFuseApply},
      {"evaluate", CmdEvaluate},
      {"audit-silence", CmdAuditSilence},
      {"trim", CmdTrim},
      {"intervene", CmdIntervene},
      {"synth-corpus", CmdSynthCorpus}};
  try {
    std::vector<std::string> args(argv, argv + argc);
    RunContext run(command, args, a.common);
    return kCommands.at(command)(run, a);
  } catch (const UsageError &e) {
    if (RunContext::Current()) RunContext::Current()->Abort();
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    if (RunContext::Current()) RunContext::Current()->Abort();
    std::string msg = e.what();
    for (char &c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "error: " << command << ": " << msg << '\n';
    return 1;
  }
}
