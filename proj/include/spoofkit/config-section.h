// include/spoofkit/config-section.h

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

#ifndef SPOOFKIT_CONFIG_SECTION_H_
#define SPOOFKIT_CONFIG_SECTION_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace spoofkit {

/// One `[section]` of an INI-style config: string values with typed getters.
/// Getters record which keys were consumed so that CheckAllUsed() can reject
/// misspelt keys.
class ConfigSection {
 public:
  ConfigSection() = default;
  ConfigSection(std::string name, std::map<std::string, std::string> values)
      : name_(std::move(name)), values_(std::move(values)) {}

  const std::string &name() const { return name_; }
  bool Has(const std::string &key) const { return values_.count(key) != 0; }

  std::string String(const std::string &key, const std::string &def) const;
  std::string RequiredString(const std::string &key) const;
  int Int(const std::string &key, int def) const;
  double Double(const std::string &key, double def) const;
  bool Bool(const std::string &key, bool def) const;
  // Seeds have no default: reproducibility requires them to be spelled out.
  uint64_t Seed(const std::string &key) const;
  std::vector<std::string> List(const std::string &key) const;

  void CheckAllUsed() const;

  void Set(const std::string &key, const std::string &value) { values_[key] = value; }
  const std::map<std::string, std::string> &values() const { return values_; }

 private:
  std::string Lookup(const std::string &key) const;

  std::string name_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

// Ordered key/value pairs used when printing configs back out.
using KeyValueList = std::vector<std::pair<std::string, std::string>>;

std::string FormatDouble(double v);

}  // namespace spoofkit

#endif  // SPOOFKIT_CONFIG_SECTION_H_
