// src/feature-io.cc

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

#include "spoofkit/feature-io.h"

#include <fstream>
#include <set>
#include <sstream>

#include "spoofkit/binary-io.h"

namespace spoofkit {

namespace {
constexpr char kFeatureMagic[9] = "SKFEAT01";
constexpr uint32_t kFeatureVersion = 1;
}  // namespace

void WriteFeatures(const std::string &path, const FeatureMatrix &features) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path + " for writing");
  BinaryWriter w(&os);
  w.Header(kFeatureMagic, kFeatureVersion, features.kind);
  w.U32(static_cast<uint32_t>(features.n_static));
  w.U8(features.includes_deltas ? 1 : 0);
  w.U64(static_cast<uint64_t>(features.frames()));
  w.U64(static_cast<uint64_t>(features.dims()));
  for (Eigen::Index t = 0; t < features.data.rows(); ++t)
    for (Eigen::Index d = 0; d < features.data.cols(); ++d)
      w.F32(static_cast<float>(features.data(t, d)));
}

FeatureMatrix ReadFeatures(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open feature file " + path);
  try {
    BinaryReader r(&is);
    FeatureMatrix f;
    f.kind = r.Header(kFeatureMagic, kFeatureVersion);
    f.n_static = static_cast<int>(r.U32());
    f.includes_deltas = r.U8() != 0;
    const uint64_t frames = r.U64(), dims = r.U64();
    if (frames > (1ull << 31) || dims > (1ull << 20)) throw Error("implausible feature shape");
    f.data.resize(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(dims));
    for (uint64_t t = 0; t < frames; ++t)
      for (uint64_t d = 0; d < dims; ++d) f.data(t, d) = r.F32();
    f.Validate();
    return f;
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

ScpEntries ReadScp(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open manifest " + path);
  ScpEntries out;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string id, file, extra;
    if (!(ls >> id)) continue;
    if (!(ls >> file) || (ls >> extra))
      throw Error(path + ":" + std::to_string(lineno) + ": expected 'utterance_id path'");
    if (!seen.insert(id).second)
      throw Error(path + ":" + std::to_string(lineno) + ": duplicate utterance id " + id);
    out.emplace_back(id, file);
  }
  return out;
}

void WriteScp(const std::string &path, const ScpEntries &entries) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot open " + path + " for writing");
  for (const auto &[id, file] : entries) os << id << ' ' << file << '\n';
  if (!os) throw Error("write failed: " + path);
}

}  // namespace spoofkit
