// spoofkit/parallel.h

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

#ifndef SPOOFKIT_PARALLEL_H_
#define SPOOFKIT_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace spoofkit {

/// Runs task(i) for every i in [0, n) on up to `jobs` threads.  Tasks must
/// write only to slots owned by their index; callers reduce afterwards in
/// index order, which keeps results independent of the worker count.  The
/// first exception thrown by any task is rethrown on the calling thread.
void ParallelFor(size_t n, int jobs, const std::function<void(size_t)> &task);

}  // namespace spoofkit

#endif  // SPOOFKIT_PARALLEL_H_
