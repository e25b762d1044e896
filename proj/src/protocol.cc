// src/protocol.cc

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

#include "spoofkit/protocol.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "spoofkit/random.h"

namespace spoofkit {

namespace {

std::vector<std::string> SplitWhitespace(const std::string &line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::ifstream OpenIn(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return is;
}

std::ofstream OpenOut(const std::string &path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  return os;
}

void CheckClasses(const Protocol &p, const char *name) {
  if (p.empty()) throw Error(std::string("partition: ") + name + " is empty");
  bool bona = false, spoof = false;
  for (const TrialEntry &e : p) (e.is_bonafide() ? bona : spoof) = true;
  if (!bona) throw Error(std::string("partition: ") + name + " has no bonafide rows");
  if (!spoof) throw Error(std::string("partition: ") + name + " has no spoof rows");
}

std::set<std::string> SpoofAttacks(const Protocol &p) {
  std::set<std::string> out;
  for (const TrialEntry &e : p)
    if (!e.is_bonafide()) out.insert(e.attack);
  return out;
}

}  // namespace

std::string ToString(TrialKey key) { return key == TrialKey::kBonafide ? "bonafide" : "spoof"; }

Protocol ParseProtocol(std::istream &is, const std::string &name) {
  Protocol out;
  std::unordered_set<std::string> seen;
  std::string line;
  for (int lineno = 1; std::getline(is, line); ++lineno) {
    const std::vector<std::string> cols = SplitWhitespace(line);
    if (cols.empty()) continue;
    const std::string where = name + ":" + std::to_string(lineno);
    if (cols.size() != 4 && cols.size() != 5)
      throw Error(where + ": expected 4 or 5 columns, got " + std::to_string(cols.size()));
    TrialEntry e;
    e.speaker = cols[0];
    e.utterance = cols[1];
    if (cols.size() == 5) e.environment = cols[2];
    e.attack = cols[cols.size() - 2];
    const std::string key = Lower(cols.back());
    if (key == "bonafide") e.key = TrialKey::kBonafide;
    else if (key == "spoof") e.key = TrialKey::kSpoof;
    else throw Error(where + ": unknown key '" + cols.back() + "'");
    if (e.is_bonafide() != (e.attack == "-"))
      throw Error(where + ": attack must be '-' exactly for bonafide rows");
    if (!seen.insert(e.utterance).second) throw Error(where + ": duplicate utterance " + e.utterance);
    out.push_back(std::move(e));
  }
  return out;
}

Protocol ParseProtocol(const std::string &path) {
  std::ifstream is = OpenIn(path);
  return ParseProtocol(is, path);
}

void WriteProtocol(const std::string &path, const Protocol &protocol) {
  std::ofstream os = OpenOut(path);
  for (const TrialEntry &e : protocol) {
    os << e.speaker << ' ' << e.utterance << ' ';
    if (e.environment) os << *e.environment << ' ';
    os << e.attack << ' ' << ToString(e.key) << '\n';
  }
  if (!os) throw Error("write failed: " + path);
}

void PartitionSpec::Validate() const {
  if (heldout_attacks.empty()) throw Error("partition: heldout_attacks must be non-empty");
  if (heldout_attacks.count("-")) throw Error("partition: '-' is not an attack");
  if (dev_es_speakers.empty() && !(dev_es_speaker_fraction > 0.0 && dev_es_speaker_fraction < 1.0))
    throw Error("partition: dev_es_speaker_fraction must be in (0, 1)");
}

KeyValueList PartitionSpec::ToKeyValues() const {
  auto join = [](const std::set<std::string> &s) {
    std::string out;
    for (const std::string &v : s) out += (out.empty() ? "" : ",") + v;
    return out;
  };
  return {{"heldout_attacks", join(heldout_attacks)},
          {"dev_es_speaker_fraction", FormatDouble(dev_es_speaker_fraction)},
          {"dev_es_speakers", join(dev_es_speakers)},
          {"seed", std::to_string(seed)}};
}

PartitionSpec PartitionSpec::FromSection(const ConfigSection &s) {
  PartitionSpec p;
  for (const std::string &a : s.List("heldout_attacks")) p.heldout_attacks.insert(a);
  p.dev_es_speaker_fraction = s.Double("dev_es_speaker_fraction", p.dev_es_speaker_fraction);
  for (const std::string &a : s.List("dev_es_speakers")) p.dev_es_speakers.insert(a);
  p.seed = s.Seed("seed");
  p.Validate();
  return p;
}

std::string ToString(Subset subset) {
  switch (subset) {
    case Subset::kTrainTr: return "train_tr";
    case Subset::kDevEs: return "dev_es";
    case Subset::kDevLr: return "dev_lr";
    case Subset::kDiscarded: return "discarded";
  }
  return "";
}

Subset SubsetFromString(const std::string &name) {
  for (Subset s : {Subset::kTrainTr, Subset::kDevEs, Subset::kDevLr, Subset::kDiscarded})
    if (ToString(s) == name) return s;
  throw Error("unknown subset '" + name + "'");
}

Partition PartitionDataset(const Protocol &train, const Protocol &dev, const PartitionSpec &spec) {
  spec.Validate();
  const std::set<std::string> train_attacks = SpoofAttacks(train), dev_attacks = SpoofAttacks(dev);
  for (const std::string &a : spec.heldout_attacks) {
    if (!dev_attacks.count(a)) throw Error("partition: held-out attack " + a + " absent from dev");
    if (!train_attacks.count(a)) throw Error("partition: held-out attack " + a + " absent from train");
  }

  std::set<std::string> dev_speaker_set;
  for (const TrialEntry &e : dev) dev_speaker_set.insert(e.speaker);
  Partition part;
  if (!spec.dev_es_speakers.empty()) {
    for (const std::string &s : spec.dev_es_speakers)
      if (!dev_speaker_set.count(s)) throw Error("partition: dev_es speaker " + s + " not in dev");
    part.dev_es_speakers = spec.dev_es_speakers;
  } else {
    std::vector<std::string> speakers(dev_speaker_set.begin(), dev_speaker_set.end());
    if (speakers.size() < 2) throw Error("partition: dev needs at least two speakers");
    Rng rng(spec.seed);
    rng.Shuffle(&speakers);
    long n = std::lround(spec.dev_es_speaker_fraction * speakers.size());
    n = std::clamp<long>(n, 1, static_cast<long>(speakers.size()) - 1);
    part.dev_es_speakers.insert(speakers.begin(), speakers.begin() + n);
  }

  for (const TrialEntry &e : train) {
    const bool keep = (e.is_bonafide() || !spec.heldout_attacks.count(e.attack)) &&
                      !part.dev_es_speakers.count(e.speaker);
    if (keep) part.train_tr.push_back(e);
    part.manifest.push_back({e.utterance, "train", keep ? Subset::kTrainTr : Subset::kDiscarded});
  }
  for (const TrialEntry &e : dev) {
    Subset s;
    if (!part.dev_es_speakers.count(e.speaker)) {
      s = Subset::kDevLr;
      part.dev_lr.push_back(e);
    } else if (e.is_bonafide() || spec.heldout_attacks.count(e.attack)) {
      s = Subset::kDevEs;
      part.dev_es.push_back(e);
    } else {
      s = Subset::kDiscarded;
    }
    part.manifest.push_back({e.utterance, "dev", s});
  }

  CheckClasses(part.train_tr, "train_tr");
  CheckClasses(part.dev_es, "dev_es");
  CheckClasses(part.dev_lr, "dev_lr");
  const std::set<std::string> lr_attacks = SpoofAttacks(part.dev_lr);
  for (const std::string &a : dev_attacks)
    if (!lr_attacks.count(a))
      throw Error("partition: dev attack " + a + " has no rows in dev_lr; choose another speaker split");
  return part;
}

void WritePartitionManifest(const std::string &path, const Partition &partition) {
  std::ofstream os = OpenOut(path);
  os << "utterance_id,source,subset\n";
  for (const ManifestRow &r : partition.manifest)
    os << r.utterance << ',' << r.source << ',' << ToString(r.subset) << '\n';
  if (!os) throw Error("write failed: " + path);
}

std::map<std::string, Subset> ReadPartitionManifest(const std::string &path) {
  std::ifstream is = OpenIn(path);
  std::string line;
  if (!std::getline(is, line) || line != "utterance_id,source,subset")
    throw Error(path + ": not a partition manifest");
  std::map<std::string, Subset> out;
  for (int lineno = 2; std::getline(is, line); ++lineno) {
    if (line.empty()) continue;
    const size_t a = line.find(','), b = line.rfind(',');
    if (a == std::string::npos || a == b) throw Error(path + ":" + std::to_string(lineno) + ": malformed row");
    const std::string utt = line.substr(0, a);
    if (!out.emplace(utt, SubsetFromString(line.substr(b + 1))).second)
      throw Error(path + ":" + std::to_string(lineno) + ": duplicate utterance " + utt);
  }
  return out;
}

void WritePartitionCounts(const std::string &path, const Partition &partition) {
  std::map<std::tuple<std::string, std::string, std::string, std::string>, long> counts;
  auto add = [&counts](const Protocol &p, Subset s) {
    for (const TrialEntry &e : p) ++counts[{ToString(s), ToString(e.key), e.attack, e.speaker}];
  };
  add(partition.train_tr, Subset::kTrainTr);
  add(partition.dev_es, Subset::kDevEs);
  add(partition.dev_lr, Subset::kDevLr);
  long discarded = 0;
  for (const ManifestRow &r : partition.manifest) discarded += r.subset == Subset::kDiscarded;
  std::ofstream os = OpenOut(path);
  os << "subset,key,attack,speaker,count\n";
  for (const auto &[k, n] : counts)
    os << std::get<0>(k) << ',' << std::get<1>(k) << ',' << std::get<2>(k) << ',' << std::get<3>(k)
       << ',' << n << '\n';
  os << "discarded,,,," << discarded << '\n';
  if (!os) throw Error("write failed: " + path);
}

Protocol FilterBySubset(const Protocol &protocol, const std::map<std::string, Subset> &manifest,
                        Subset subset) {
  Protocol out;
  for (const TrialEntry &e : protocol) {
    auto it = manifest.find(e.utterance);
    if (it == manifest.end()) throw Error("utterance " + e.utterance + " missing from partition manifest");
    if (it->second == subset) out.push_back(e);
  }
  return out;
}

double ParseDouble(const std::string &text, const std::string &context) {
  double v = 0.0;
  const char *end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw Error(context + ": cannot parse '" + text + "' as a finite number");
  return v;
}

std::vector<ScoreRecord> ReadScores(std::istream &is, const std::string &name) {
  std::vector<ScoreRecord> out;
  std::unordered_set<std::string> seen;
  std::string line;
  for (int lineno = 1; std::getline(is, line); ++lineno) {
    const std::vector<std::string> cols = SplitWhitespace(line);
    if (cols.empty()) continue;
    const std::string where = name + ":" + std::to_string(lineno);
    if (cols.size() != 2) throw Error(where + ": expected 'utterance_id score'");
    if (!seen.insert(cols[0]).second) throw Error(where + ": duplicate utterance " + cols[0]);
    out.push_back({cols[0], ParseDouble(cols[1], where)});
  }
  return out;
}

std::vector<ScoreRecord> ReadScores(const std::string &path) {
  std::ifstream is = OpenIn(path);
  return ReadScores(is, path);
}

void WriteScores(const std::string &path, const std::vector<ScoreRecord> &records) {
  std::ofstream os = OpenOut(path);
  for (const ScoreRecord &r : records) {
    if (!std::isfinite(r.score)) throw Error("non-finite score for " + r.utterance);
    os << r.utterance << ' ' << FormatDouble(r.score) << '\n';
  }
  if (!os) throw Error("write failed: " + path);
}

ScoreSet JoinScores(const Protocol &protocol, const std::vector<ScoreRecord> &scores) {
  std::unordered_map<std::string, double> lookup;
  for (const ScoreRecord &r : scores) lookup.emplace(r.utterance, r.score);
  ScoreSet set;
  size_t missing = 0;
  std::string first_missing;
  for (const TrialEntry &e : protocol) {
    auto it = lookup.find(e.utterance);
    if (it == lookup.end()) {
      if (missing++ == 0) first_missing = e.utterance;
      continue;
    }
    (e.is_bonafide() ? set.bonafide : set.spoof).push_back(it->second);
  }
  if (missing)
    throw Error(std::to_string(missing) + " protocol utterances have no score (first: " + first_missing + ")");
  const size_t extra = lookup.size() - (set.bonafide.size() + set.spoof.size());
  if (extra) Warn(std::to_string(extra) + " scored utterances are not in the protocol; ignored");
  return set;
}

}  // namespace spoofkit
