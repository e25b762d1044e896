// spoofkit/base.h

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

#ifndef SPOOFKIT_BASE_H_
#define SPOOFKIT_BASE_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spoofkit {

// Row-major so that one row is one frame (or one utterance vector).
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Every recoverable failure in the toolkit is reported with this type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

/// Usage errors in the command-line layer map to exit code 2.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string &what) : Error(what) {}
};

// Floors shared by all spectral features and normalizers.
inline constexpr double kLogFloor = 1e-10;
inline constexpr double kStdFloor = 1e-8;

void Warn(const std::string &msg);

// Silences warnings (tests set this to keep output readable).
void SetWarningsEnabled(bool enabled);

}  // namespace spoofkit

#endif  // SPOOFKIT_BASE_H_
