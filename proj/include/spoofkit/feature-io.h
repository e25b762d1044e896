// include/spoofkit/feature-io.h

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

#ifndef SPOOFKIT_FEATURE_IO_H_
#define SPOOFKIT_FEATURE_IO_H_

#include <string>
#include <utility>
#include <vector>

#include "spoofkit/features.h"

namespace spoofkit {

// Feature container layout (little-endian):
//   "SKFEAT01" | u32 version | u32 len + kind tag | u32 n_static |
//   u8 includes_deltas | u64 frames | u64 dims | frames*dims float32, row-major
void WriteFeatures(const std::string &path, const FeatureMatrix &features);
FeatureMatrix ReadFeatures(const std::string &path);

// Manifest of `utterance_id path` lines, order preserved.
using ScpEntries = std::vector<std::pair<std::string, std::string>>;
ScpEntries ReadScp(const std::string &path);
void WriteScp(const std::string &path, const ScpEntries &entries);

}  // namespace spoofkit

#endif  // SPOOFKIT_FEATURE_IO_H_
