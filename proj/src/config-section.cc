// src/config-section.cc

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

#include "spoofkit/config-section.h"

#include <charconv>
#include <sstream>

#include "spoofkit/base.h"

namespace spoofkit {

std::string ConfigSection::Lookup(const std::string &key) const {
  used_.insert(key);
  return values_.at(key);
}

std::string ConfigSection::String(const std::string &key, const std::string &def) const {
  return Has(key) ? Lookup(key) : def;
}

std::string ConfigSection::RequiredString(const std::string &key) const {
  if (!Has(key)) throw Error("[" + name_ + "] missing required key '" + key + "'");
  return Lookup(key);
}

int ConfigSection::Int(const std::string &key, int def) const {
  if (!Has(key)) return def;
  const std::string v = Lookup(key);
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw Error("[" + name_ + "] " + key + ": expected an integer, got '" + v + "'");
  return out;
}

double ConfigSection::Double(const std::string &key, double def) const {
  if (!Has(key)) return def;
  const std::string v = Lookup(key);
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw Error("[" + name_ + "] " + key + ": expected a number, got '" + v + "'");
  return out;
}

bool ConfigSection::Bool(const std::string &key, bool def) const {
  if (!Has(key)) return def;
  const std::string v = Lookup(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error("[" + name_ + "] " + key + ": expected true/false, got '" + v + "'");
}

uint64_t ConfigSection::Seed(const std::string &key) const {
  if (!Has(key))
    throw Error("[" + name_ + "] missing required seed '" + key + "' (seeds must be explicit)");
  const std::string v = Lookup(key);
  uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw Error("[" + name_ + "] " + key + ": expected a non-negative integer seed");
  return out;
}

std::vector<std::string> ConfigSection::List(const std::string &key) const {
  std::vector<std::string> out;
  if (!Has(key)) return out;
  std::string v = Lookup(key);
  for (char &c : v)
    if (c == ',') c = ' ';
  std::istringstream is(v);
  std::string item;
  while (is >> item) out.push_back(item);
  return out;
}

void ConfigSection::CheckAllUsed() const {
  for (const auto &[key, value] : values_)
    if (!used_.count(key)) throw Error("[" + name_ + "] unknown key '" + key + "'");
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace spoofkit
