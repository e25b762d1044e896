// tests/protocol-test.cc

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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "partition-oracle.h"
#include "spoofkit/protocol.h"
#include "spoofkit/random.h"

using namespace spoofkit;

namespace {

std::string TempPath(const std::string &name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

TrialEntry Row(const std::string &spk, const std::string &utt, const std::string &attack) {
  return {spk, utt, std::nullopt, attack, attack == "-" ? TrialKey::kBonafide : TrialKey::kSpoof};
}

}  // namespace

TEST_CASE("protocol parsing") {
  std::istringstream four("S1 U1 - bonafide\n\nS1 U2 A01 SPOOF\n");
  const Protocol p = ParseProtocol(four);
  REQUIRE(p.size() == 2);
  CHECK(p[0].speaker == "S1");
  CHECK(p[0].utterance == "U1");
  CHECK_FALSE(p[0].environment.has_value());
  CHECK(p[0].attack == "-");
  CHECK(p[0].is_bonafide());
  CHECK(p[1].key == TrialKey::kSpoof);

  std::istringstream five("S1 U2 eaa A03 spoof\n");
  const Protocol q = ParseProtocol(five);
  CHECK(*q[0].environment == "eaa");
  CHECK(q[0].attack == "A03");

  std::istringstream genuine("S1 U1 - bonafide\nS1 U3 - genuine\n");
  CHECK_THROWS_WITH_AS(ParseProtocol(genuine, "p.txt"), doctest::Contains("p.txt:2"), Error);
  std::istringstream dup("S1 U1 - bonafide\nS2 U1 A01 spoof\n");
  CHECK_THROWS_WITH_AS(ParseProtocol(dup), doctest::Contains("duplicate"), Error);
  std::istringstream cols("S1 U1 bonafide\n");
  CHECK_THROWS_AS(ParseProtocol(cols), Error);
  std::istringstream mismatch("S1 U1 A01 bonafide\n");
  CHECK_THROWS_AS(ParseProtocol(mismatch), Error);
}

TEST_CASE("protocol file round trip") {
  const Protocol p{Row("S1", "U1", "-"), {"S2", "U2", std::string("eaa"), "A02", TrialKey::kSpoof}};
  const auto path = TempPath("spoofkit-protocol.txt");
  WriteProtocol(path, p);
  const Protocol q = ParseProtocol(path);
  REQUIRE(q.size() == 2);
  CHECK(q[1].environment == std::optional<std::string>("eaa"));
  CHECK(q[1].attack == "A02");
  std::filesystem::remove(path);
}

TEST_CASE("toy partition") {
  Protocol train, dev;
  int u = 0;
  for (const char *spk : {"t1", "t2"})
    for (const char *a : {"-", "X", "Y"}) train.push_back(Row(spk, "u" + std::to_string(u++), a));
  for (const char *spk : {"s1", "s2", "s3", "s4"})
    for (const char *a : {"-", "X", "Y"}) dev.push_back(Row(spk, "u" + std::to_string(u++), a));
  PartitionSpec spec;
  spec.heldout_attacks = {"Y"};
  spec.dev_es_speakers = {"s3", "s4"};
  const Partition part = PartitionDataset(train, dev, spec);
  for (const auto &e : part.train_tr) CHECK(e.attack != "Y");
  for (const auto &e : part.dev_es) {
    CHECK((e.speaker == "s3" || e.speaker == "s4"));
    if (!e.is_bonafide()) CHECK(e.attack == "Y");
  }
  for (const auto &e : part.dev_lr) CHECK((e.speaker == "s1" || e.speaker == "s2"));
  CHECK(oracle::Attacks(part.dev_lr) == oracle::StrSet{"X", "Y"});
  CHECK(oracle::PartitionViolations(train, dev, spec.heldout_attacks, part).empty());

  spec.heldout_attacks = {"X", "Y"};
  CHECK_THROWS_WITH_AS(PartitionDataset(train, dev, spec), doctest::Contains("train_tr"), Error);
  spec.heldout_attacks = {"Z"};
  CHECK_THROWS_AS(PartitionDataset(train, dev, spec), Error);
  spec.heldout_attacks = {};
  CHECK_THROWS_AS(PartitionDataset(train, dev, spec), Error);
}

TEST_CASE("seeded speaker selection is deterministic and sized by the fraction") {
  spoofkit::Rng rng(5);
  oracle::ToyProtocols t = oracle::RandomToy(&rng, true);
  while (oracle::Speakers(t.dev).size() < 4) t = oracle::RandomToy(&rng, true);
  PartitionSpec spec;
  spec.heldout_attacks = t.heldout;
  spec.seed = 42;
  const Partition a = PartitionDataset(t.train, t.dev, spec);
  const Partition b = PartitionDataset(t.train, t.dev, spec);
  CHECK(a.dev_es_speakers == b.dev_es_speakers);
  const size_t n = oracle::Speakers(t.dev).size();
  CHECK(a.dev_es_speakers.size() == static_cast<size_t>(std::lround(0.5 * n)));
}

TEST_CASE("fuzzed partitions satisfy the set-algebra oracle") {
  spoofkit::Rng rng(77);
  int valid = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const oracle::ToyProtocols t = oracle::RandomToy(&rng, trial % 2 == 0);
    PartitionSpec spec;
    spec.heldout_attacks = t.heldout;
    spec.seed = trial;
    try {
      const Partition part = PartitionDataset(t.train, t.dev, spec);
      const auto v = oracle::PartitionViolations(t.train, t.dev, t.heldout, part);
      CHECK_MESSAGE(v.empty(), (v.empty() ? "" : v[0]));
      ++valid;
    } catch (const Error &) {
      // A rejection must correspond to a genuinely unusable split.  Recreate
      // the speaker choice through an explicit-speaker run of the oracle.
      std::vector<std::string> speakers;
      for (const auto &s : oracle::Speakers(t.dev)) speakers.push_back(s);
      spoofkit::Rng pick(spec.seed);
      pick.Shuffle(&speakers);
      const long n = std::clamp<long>(std::lround(0.5 * speakers.size()), 1, speakers.size() - 1);
      const oracle::StrSet es(speakers.begin(), speakers.begin() + n);
      CHECK_FALSE(oracle::Expected(t.train, t.dev, t.heldout, es).valid);
    }
  }
  CHECK(valid > 100);
}

TEST_CASE("manifest and counts files") {
  spoofkit::Rng rng(3);
  const oracle::ToyProtocols t = oracle::RandomToy(&rng, true);
  PartitionSpec spec;
  spec.heldout_attacks = t.heldout;
  spec.seed = 1;
  const Partition part = PartitionDataset(t.train, t.dev, spec);
  const auto path = TempPath("spoofkit-partition.csv");
  WritePartitionManifest(path, part);
  const auto manifest = ReadPartitionManifest(path);
  CHECK(manifest.size() == t.train.size() + t.dev.size());
  CHECK(oracle::Utts(FilterBySubset(t.dev, manifest, Subset::kDevLr)) == oracle::Utts(part.dev_lr));
  WritePartitionCounts(path, part);
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  CHECK(header == "subset,key,attack,speaker,count");
  std::filesystem::remove(path);
}

TEST_CASE("score files") {
  const auto path = TempPath("spoofkit-scores.txt");
  WriteScores(path, {{"U1", -0.5}});
  const auto one = ReadScores(path);
  REQUIRE(one.size() == 1);
  CHECK(one[0].utterance == "U1");
  CHECK(one[0].score == -0.5);

  spoofkit::Rng rng(9);
  std::vector<ScoreRecord> many;
  for (int i = 0; i < 10000; ++i) many.push_back({"utt" + std::to_string(i), rng.Normal() * std::exp(rng.Uniform(-20, 20))});
  WriteScores(path, many);
  const auto back = ReadScores(path);
  REQUIRE(back.size() == many.size());
  bool equal = true;
  for (size_t i = 0; i < many.size(); ++i)
    equal = equal && back[i].utterance == many[i].utterance && back[i].score == many[i].score;
  CHECK(equal);

  std::istringstream dup("U1 1\nU1 2\n");
  CHECK_THROWS_WITH_AS(ReadScores(dup), doctest::Contains("duplicate"), Error);
  std::istringstream junk("U1 abc\n");
  CHECK_THROWS_AS(ReadScores(junk), Error);
  std::istringstream nan("U1 nan\n");
  CHECK_THROWS_AS(ReadScores(nan), Error);
  CHECK_THROWS_AS(WriteScores(path, {{"U1", NAN}}), Error);
  std::filesystem::remove(path);
}

TEST_CASE("joining scores with a protocol") {
  const Protocol p{Row("S", "a", "-"), Row("S", "b", "A01"), Row("S", "c", "A01")};
  const ScoreSet s = JoinScores(p, {{"c", 3}, {"a", 1}, {"b", 2}, {"z", 0}});
  CHECK(s.bonafide == std::vector<double>{1});
  CHECK(s.spoof == std::vector<double>{2, 3});
  CHECK_THROWS_WITH_AS(JoinScores(p, {{"a", 1}}), doctest::Contains("no score"), Error);
}
