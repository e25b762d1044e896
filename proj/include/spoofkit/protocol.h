// include/spoofkit/protocol.h

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

#ifndef SPOOFKIT_PROTOCOL_H_
#define SPOOFKIT_PROTOCOL_H_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spoofkit/base.h"
#include "spoofkit/config-section.h"
#include "spoofkit/metrics.h"

namespace spoofkit {

enum class TrialKey { kBonafide, kSpoof };

std::string ToString(TrialKey key);

/// One row of an ASVspoof-style protocol file.  attack is "-" for bonafide.
struct TrialEntry {
  std::string speaker;
  std::string utterance;
  std::optional<std::string> environment;
  std::string attack;
  TrialKey key = TrialKey::kBonafide;

  bool is_bonafide() const { return key == TrialKey::kBonafide; }
};

using Protocol = std::vector<TrialEntry>;

// Whitespace separated "speaker utt attack key" or
// "speaker utt environment attack key"; blank lines are skipped.
Protocol ParseProtocol(std::istream &is, const std::string &name = "<stream>");
Protocol ParseProtocol(const std::string &path);
void WriteProtocol(const std::string &path, const Protocol &protocol);

struct PartitionSpec {
  std::set<std::string> heldout_attacks;
  double dev_es_speaker_fraction = 0.5;
  // When non-empty, overrides the seeded selection.
  std::set<std::string> dev_es_speakers;
  uint64_t seed = 0;

  void Validate() const;
  KeyValueList ToKeyValues() const;
  static PartitionSpec FromSection(const ConfigSection &section);
};

enum class Subset { kTrainTr, kDevEs, kDevLr, kDiscarded };

std::string ToString(Subset subset);
Subset SubsetFromString(const std::string &name);

struct ManifestRow {
  std::string utterance;
  std::string source;  // "train" or "dev"
  Subset subset;
};

struct Partition {
  Protocol train_tr;
  Protocol dev_es;
  Protocol dev_lr;
  std::set<std::string> dev_es_speakers;
  // One row per input row, train rows first, in input order.
  std::vector<ManifestRow> manifest;
};

/// train_tr: train rows whose attack is not held out and whose speaker is not
/// a dev_es speaker.  dev_es: dev rows of dev_es speakers that are bonafide or
/// use a held-out attack.  dev_lr: every dev row of the remaining speakers.
/// Throws if any subset is empty or lacks a class, if a held-out attack is
/// absent from either protocol, or if dev_lr loses a dev attack.
Partition PartitionDataset(const Protocol &train, const Protocol &dev, const PartitionSpec &spec);

// partition.csv: utterance_id,source,subset
void WritePartitionManifest(const std::string &path, const Partition &partition);
std::map<std::string, Subset> ReadPartitionManifest(const std::string &path);
// counts.csv: subset,key,attack,speaker,count
void WritePartitionCounts(const std::string &path, const Partition &partition);

// Keeps the rows assigned to `subset` by a manifest.
Protocol FilterBySubset(const Protocol &protocol, const std::map<std::string, Subset> &manifest,
                        Subset subset);

struct ScoreRecord {
  std::string utterance;
  double score;
};

std::vector<ScoreRecord> ReadScores(const std::string &path);
std::vector<ScoreRecord> ReadScores(std::istream &is, const std::string &name = "<stream>");
// Scores are printed in shortest round-trip form, so read(write(x)) == x.
void WriteScores(const std::string &path, const std::vector<ScoreRecord> &records);

/// Looks up every protocol row's score.  A row without a score is an error;
/// scores for utterances outside the protocol are ignored with a warning.
ScoreSet JoinScores(const Protocol &protocol, const std::vector<ScoreRecord> &scores);

// Strict numeric parsing shared by the text formats.
double ParseDouble(const std::string &text, const std::string &context);

}  // namespace spoofkit

#endif  // SPOOFKIT_PROTOCOL_H_
