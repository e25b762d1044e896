// src/fft.h

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

#ifndef SPOOFKIT_SRC_FFT_H_
#define SPOOFKIT_SRC_FFT_H_

#include <complex>
#include <span>

namespace spoofkit {

// Real-to-complex DFT of a fixed size backed by FFTW.  Plans are created once
// per size under a lock; execution is thread-safe.
class RealFft {
 public:
  explicit RealFft(int size);

  int size() const { return size_; }

  // in.size() == size(), out.size() == size() / 2 + 1.
  void Forward(std::span<double> in, std::span<std::complex<double>> out) const;

 private:
  int size_;
  void *plan_;  // fftw_plan, owned by the process-wide cache
};

}  // namespace spoofkit

#endif  // SPOOFKIT_SRC_FFT_H_
