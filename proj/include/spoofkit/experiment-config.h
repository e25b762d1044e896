// include/spoofkit/experiment-config.h

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

#ifndef SPOOFKIT_EXPERIMENT_CONFIG_H_
#define SPOOFKIT_EXPERIMENT_CONFIG_H_

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "spoofkit/config-section.h"

namespace spoofkit {

/// Whole INI file: `[section]` headers followed by `key = value` lines,
/// ';' comments.  Unknown section names are rejected at load time; unknown
/// keys are rejected by CheckUsed() once a command has read what it needs.
///
/// Keys of the [paths] section may be overridden by the environment:
/// SPOOFKIT_PATHS_<KEY> (key upper-cased).  No other section honours the
/// environment.
class IniConfig {
 public:
  IniConfig() = default;

  static IniConfig Load(const std::string &path);
  static IniConfig Parse(std::istream &is, const std::string &name);

  // Missing sections come back empty, so that defaults apply.
  const ConfigSection &Section(const std::string &name) const;
  bool HasSection(const std::string &name) const { return sections_.count(name) != 0; }
  ConfigSection *MutableSection(const std::string &name);

  // Calls ConfigSection::CheckAllUsed() for each listed section present.
  void CheckUsed(const std::vector<std::string> &names) const;

  // Sorted, whitespace-normalized rendering; hashed into run manifests.
  std::string Canonical() const;

  static const std::vector<std::string> &KnownSections();

 private:
  void ApplyEnvironment();

  std::map<std::string, ConfigSection> sections_;
};

// Required path from [paths]; throws naming the key and the env override.
std::string RequiredPath(const IniConfig &config, const std::string &key);

// Hex SHA-256.
std::string Sha256Hex(const std::string &data);

inline constexpr const char *kSpoofkitVersion = "0.1.0";

// Name -> version of spoofkit and the numerical libraries it was built with.
std::map<std::string, std::string> BuildVersions();

// Full annotated default config, as printed by --dump-config.
std::string DefaultConfigText();

}  // namespace spoofkit

#endif  // SPOOFKIT_EXPERIMENT_CONFIG_H_
