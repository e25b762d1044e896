// tools/run-context.h

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

#ifndef SPOOFKIT_TOOLS_RUN_CONTEXT_H_
#define SPOOFKIT_TOOLS_RUN_CONTEXT_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spoofkit/experiment-config.h"
#include "spoofkit/protocol.h"

namespace spoofkit {

// Options shared by all subcommands.
struct CommonOptions {
  std::string config_path;
  int jobs = 0;  // 0: take [pipeline] jobs from the config
  std::string subset;
  std::string partition_manifest;
};

/// Per-invocation bookkeeping: the loaded config, the files written so far
/// (removed again if the command fails) and the run manifest.
class RunContext {
 public:
  RunContext(std::string command, std::vector<std::string> argv, const CommonOptions &opts);

  const IniConfig &config() const { return config_; }
  IniConfig &mutable_config() { return config_; }
  bool has_config() const { return !opts_.config_path.empty(); }

  // Effective --jobs: the flag, else [pipeline] jobs, else 1.
  int Jobs() const;
  // Subset filter from --subset, applied to protocols and utterance lists.
  Protocol LoadProtocol(const std::string &path);
  std::vector<std::string> FilterIds(const std::vector<std::string> &ids);

  // Registers an output before it is written.  Directories are only
  // removed on failure when this run created them.
  std::string Output(const std::string &path);
  std::string OutputDir(const std::string &path);
  void Input(const std::string &path) { inputs_.push_back(path); }
  void Seed(const std::string &name, uint64_t value) { seeds_[name] = std::to_string(value); }

  // Writes the manifest and commits the outputs.
  void Finish(const std::string &manifest_path);
  // Removes everything registered with Output()/OutputDir().
  void Abort();

  // Last context created, for cleanup from main().
  static RunContext *Current();

 private:
  std::string command_;
  std::vector<std::string> argv_;
  CommonOptions opts_;
  IniConfig config_;
  std::vector<std::string> outputs_;
  std::vector<std::string> created_dirs_;
  std::vector<std::string> inputs_;
  std::map<std::string, std::string> seeds_;
  std::optional<std::map<std::string, Subset>> subset_manifest_;
  bool finished_ = false;
};

}  // namespace spoofkit

#endif  // SPOOFKIT_TOOLS_RUN_CONTEXT_H_
