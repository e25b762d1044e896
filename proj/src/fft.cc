// src/fft.cc

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

#include "fft.h"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "spoofkit/base.h"

namespace spoofkit {

namespace {

std::mutex g_plan_mutex;

std::map<int, fftw_plan> &PlanCache() {
  static std::map<int, fftw_plan> cache;
  return cache;
}

}  // namespace

RealFft::RealFft(int size) : size_(size), plan_(nullptr) {
  if (size < 1) throw Error("FFT size must be positive");
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto &cache = PlanCache();
  auto it = cache.find(size);
  if (it == cache.end()) {
    std::vector<double> in(size);
    std::vector<fftw_complex> out(size / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(size, in.data(), out.data(),
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error("FFTW planning failed");
    it = cache.emplace(size, plan).first;
  }
  plan_ = it->second;
}

void RealFft::Forward(std::span<double> in, std::span<std::complex<double>> out) const {
  if (static_cast<int>(in.size()) != size_ ||
      static_cast<int>(out.size()) != size_ / 2 + 1)
    throw Error("FFT buffer size mismatch");
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_), in.data(),
                       reinterpret_cast<fftw_complex *>(out.data()));
}

}  // namespace spoofkit
