// src/experiment-config.cc

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

#include "spoofkit/experiment-config.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <Eigen/Core>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/version.hpp>
#include <fftw3.h>
#include <boost/property_tree/ptree.hpp>
#include <openssl/opensslv.h>
#include <openssl/sha.h>

#include "spoofkit/base.h"
#include "spoofkit/countermeasure.h"
#include "spoofkit/fusion.h"
#include "spoofkit/synth.h"

namespace spoofkit {

namespace {

const ConfigSection &EmptySection() {
  static const ConfigSection empty("", {});
  return empty;
}

}  // namespace

const std::vector<std::string> &IniConfig::KnownSections() {
  static const std::vector<std::string> names = {
      "experiment", "paths", "partition", "features", "pipeline", "gmm", "tv",
      "svm", "fusion", "cost", "silence", "intervention", "synth"};
  return names;
}

IniConfig IniConfig::Parse(std::istream &is, const std::string &name) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error &e) {
    throw Error(name + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  IniConfig config;
  const auto &known = KnownSections();
  for (const auto &[section, body] : tree) {
    if (body.empty())
      throw Error(name + ": key '" + section + "' outside any [section]");
    if (std::find(known.begin(), known.end(), section) == known.end())
      throw Error(name + ": unknown section [" + section + "]");
    std::map<std::string, std::string> values;
    for (const auto &[key, value] : body) values[key] = value.get_value<std::string>();
    config.sections_.emplace(section, ConfigSection(section, std::move(values)));
  }
  config.ApplyEnvironment();
  return config;
}

IniConfig IniConfig::Load(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config " + path);
  return Parse(is, path);
}

void IniConfig::ApplyEnvironment() {
  static const char *kKeys[] = {"audio_root", "train_protocol", "dev_protocol", "work_dir"};
  for (const char *key : kKeys) {
    std::string var = std::string("SPOOFKIT_PATHS_") + key;
    std::transform(var.begin(), var.end(), var.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (const char *v = std::getenv(var.c_str())) MutableSection("paths")->Set(key, v);
  }
}

const ConfigSection &IniConfig::Section(const std::string &name) const {
  auto it = sections_.find(name);
  if (it != sections_.end()) return it->second;
  return EmptySection();
}

ConfigSection *IniConfig::MutableSection(const std::string &name) {
  auto it = sections_.find(name);
  if (it == sections_.end()) it = sections_.emplace(name, ConfigSection(name, {})).first;
  return &it->second;
}

void IniConfig::CheckUsed(const std::vector<std::string> &names) const {
  for (const std::string &n : names) {
    auto it = sections_.find(n);
    if (it != sections_.end()) it->second.CheckAllUsed();
  }
}

std::string IniConfig::Canonical() const {
  std::ostringstream os;
  for (const auto &[name, section] : sections_) {
    os << '[' << name << "]\n";
    for (const auto &[k, v] : section.values()) os << k << '=' << v << '\n';
  }
  return os.str();
}

std::string RequiredPath(const IniConfig &config, const std::string &key) {
  std::string upper = key;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  const ConfigSection &s = config.Section("paths");
  if (!s.Has(key) || s.String(key, "").empty())
    throw Error("[paths] " + key + " is not set (config or SPOOFKIT_PATHS_" + upper + ")");
  return s.String(key, "");
}

std::string Sha256Hex(const std::string &data) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char *>(data.data()), data.size(), digest);
  static const char *hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : digest) {
    out += hex[c >> 4];
    out += hex[c & 15];
  }
  return out;
}

std::map<std::string, std::string> BuildVersions() {
  return {{"spoofkit", kSpoofkitVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"fftw", fftw_version},
          {"boost", BOOST_LIB_VERSION},
          {"openssl", OPENSSL_VERSION_TEXT}};
}

namespace {

void Emit(std::ostream &os, const std::string &section, const KeyValueList &kv,
          const std::string &comment = "") {
  os << '[' << section << "]\n";
  if (!comment.empty()) os << "; " << comment << '\n';
  for (const auto &[k, v] : kv) {
    if (k == "seed")
      os << "; seed = <required, no default>\n";
    else
      os << k << " = " << v << '\n';
  }
  os << '\n';
}

}  // namespace

std::string DefaultConfigText() {
  std::ostringstream os;
  os << "; spoofkit experiment config.  Lines starting with ';' are comments.\n"
     << "; Every 'seed' key is mandatory in the sections a command reads.\n\n";
  Emit(os, "experiment", {{"task", "PA"}}, "LA | PA; selects the fusion presets");
  Emit(os, "paths",
       {{"audio_root", ""}, {"train_protocol", ""}, {"dev_protocol", ""}, {"work_dir", ""}},
       "overridable with SPOOFKIT_PATHS_<KEY>");
  PartitionSpec partition;
  Emit(os, "partition", partition.ToKeyValues(), "heldout_attacks is required by `partition`");
  KeyValueList features = FeatureConfig{}.ToKeyValues();
  features.erase(std::remove_if(features.begin(), features.end(),
                                [](const auto &kv) { return kv.first == "kind"; }),
                 features.end());
  Emit(os, "features", features, "shared by every stream listed in [pipeline] features");
  const PipelineConfig pipeline;
  Emit(os, "pipeline",
       {{"backend", ToString(pipeline.backend)},
        {"features", "lfcc"},
        {"num_components", std::to_string(pipeline.num_components)},
        {"jobs", std::to_string(pipeline.jobs)}},
       "backend: gmm | ivector-svm | ltas-svm; features: comma-separated kinds");
  Emit(os, "gmm", EmConfig{}.ToKeyValues());
  Emit(os, "tv", TvConfig{}.ToKeyValues());
  Emit(os, "svm", SvmConfig{}.ToKeyValues());
  Emit(os, "fusion", FusionConfig{}.ToKeyValues());
  Emit(os, "cost", CostModel{}.ToKeyValues(),
       "the three ASV rates have no default; t-DCF is reported only when all are set");
  Emit(os, "silence", SilenceReportConfig{}.ToKeyValues());
  Emit(os, "intervention", InterventionConfig{}.ToKeyValues(), "trim: leading | trailing | both");
  Emit(os, "synth", SynthConfig{}.ToKeyValues());
  return os.str();
}

}  // namespace spoofkit
