// tools/run-context.cc

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

#include "run-context.h"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "spoofkit/base.h"

namespace spoofkit {

namespace fs = std::filesystem;

namespace {
RunContext *g_current = nullptr;
}

RunContext *RunContext::Current() { return g_current; }

RunContext::RunContext(std::string command, std::vector<std::string> argv, const CommonOptions &opts)
    : command_(std::move(command)), argv_(std::move(argv)), opts_(opts) {
  g_current = this;
  if (!opts_.config_path.empty()) {
    config_ = IniConfig::Load(opts_.config_path);
    inputs_.push_back(opts_.config_path);
  }
  if (opts_.jobs < 0) throw UsageError("--jobs must be positive");
  if (!opts_.subset.empty()) {
    SubsetFromString(opts_.subset);
    std::string path = opts_.partition_manifest;
    if (path.empty() && config_.Section("paths").Has("work_dir"))
      path = (fs::path(config_.Section("paths").String("work_dir", "")) / "partition" / "manifest.csv")
                 .string();
    if (path.empty()) throw UsageError("--subset needs --partition-manifest or [paths] work_dir");
    subset_manifest_ = ReadPartitionManifest(path);
    inputs_.push_back(path);
  }
}

int RunContext::Jobs() const {
  if (opts_.jobs > 0) return opts_.jobs;
  const int jobs = config_.Section("pipeline").Int("jobs", 1);
  if (jobs < 1) throw Error("[pipeline] jobs must be positive");
  return jobs;
}

Protocol RunContext::LoadProtocol(const std::string &path) {
  inputs_.push_back(path);
  Protocol p = ParseProtocol(path);
  if (subset_manifest_) p = FilterBySubset(p, *subset_manifest_, SubsetFromString(opts_.subset));
  if (p.empty()) throw Error(path + ": no rows" + (opts_.subset.empty() ? "" : " in subset " + opts_.subset));
  return p;
}

std::vector<std::string> RunContext::FilterIds(const std::vector<std::string> &ids) {
  if (!subset_manifest_) return ids;
  const Subset want = SubsetFromString(opts_.subset);
  std::vector<std::string> out;
  for (const std::string &id : ids) {
    auto it = subset_manifest_->find(id);
    if (it != subset_manifest_->end() && it->second == want) out.push_back(id);
  }
  return out;
}

std::string RunContext::Output(const std::string &path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) OutputDir(parent.string());
  outputs_.push_back(path);
  return path;
}

std::string RunContext::OutputDir(const std::string &path) {
  if (path.empty()) return path;
  std::vector<fs::path> missing;
  for (fs::path p = fs::path(path); !p.empty() && !fs::exists(p); p = p.parent_path()) {
    missing.push_back(p);
    if (p == p.parent_path()) break;
  }
  fs::create_directories(path);
  for (auto it = missing.rbegin(); it != missing.rend(); ++it) created_dirs_.push_back(it->string());
  return path;
}

void RunContext::Finish(const std::string &manifest_path) {
  Output(manifest_path);
  nlohmann::ordered_json j;
  j["command"] = command_;
  j["argv"] = argv_;
  j["config"] = opts_.config_path;
  j["config_sha256"] = Sha256Hex(config_.Canonical());
  std::map<std::string, std::string> seeds = seeds_;
  for (const std::string &section : IniConfig::KnownSections())
    if (config_.Section(section).Has("seed"))
      seeds.emplace(section, config_.Section(section).String("seed", ""));
  j["seeds"] = seeds;
  j["versions"] = BuildVersions();
  j["jobs"] = Jobs();
  j["subset"] = opts_.subset;
  j["inputs"] = inputs_;
  std::vector<std::string> outs(outputs_.begin(), outputs_.end() - 1);
  j["outputs"] = outs;
  std::ofstream os(manifest_path);
  os << j.dump(2) << '\n';
  if (!os) throw Error("cannot write " + manifest_path);
  finished_ = true;
}

void RunContext::Abort() {
  if (finished_) return;
  std::error_code ec;
  for (auto it = outputs_.rbegin(); it != outputs_.rend(); ++it) fs::remove(*it, ec);
  for (auto it = created_dirs_.rbegin(); it != created_dirs_.rend(); ++it) fs::remove_all(*it, ec);
  outputs_.clear();
  created_dirs_.clear();
}

}  // namespace spoofkit
