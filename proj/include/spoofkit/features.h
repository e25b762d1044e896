// include/spoofkit/features.h

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

#ifndef SPOOFKIT_FEATURES_H_
#define SPOOFKIT_FEATURES_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spoofkit/audio-io.h"
#include "spoofkit/base.h"

namespace spoofkit {

/// Short-time Fourier analysis settings, all in samples.  The window is a
/// symmetric Hamming window, zero-padded to fft_size.
struct StftConfig {
  int window_length = 400;
  int hop = 160;
  int fft_size = 512;

  int num_bins() const { return fft_size / 2 + 1; }
  void Validate() const;

  // Window/hop given in milliseconds; fft_size is the smallest power of two
  // that is >= max(window, min_fft_size).
  static StftConfig FromMilliseconds(int sample_rate, double window_ms, double hop_ms,
                                     int min_fft_size = 512);
};

enum class FilterKind { kMel, kInvertedMel, kLinear };

std::string ToString(FilterKind kind);
FilterKind FilterKindFromString(const std::string &name);

struct FilterBank {
  Matrix weights;                   // n_filters x num_bins, non-negative
  FilterKind kind = FilterKind::kMel;
  std::vector<double> center_freqs;  // Hz, one per filter
  std::vector<double> bin_freqs;     // Hz, one per FFT bin

  int num_filters() const { return static_cast<int>(weights.rows()); }
  int num_bins() const { return static_cast<int>(weights.cols()); }
};

/// frames x dims feature matrix.  When includes_deltas is set the columns are
/// [static | delta | acceleration] and dims == 3 * n_static.
struct FeatureMatrix {
  Matrix data;
  std::string kind;
  int n_static = 0;
  bool includes_deltas = false;

  int frames() const { return static_cast<int>(data.rows()); }
  int dims() const { return static_cast<int>(data.cols()); }
  void Validate() const;
};

struct CqtConfig {
  int bins_per_octave = 96;
  double f_min = 15.625;
  double f_max = 8000.0;
  int hop = 160;
  // When true the signal is treated as zero outside its support and frames are
  // centred at t * hop.  When false every kernel must fit inside the signal
  // (the signal must be at least as long as the f_min kernel).
  bool zero_extend = true;

  void Validate(int sample_rate) const;
  double q_factor() const;
  std::vector<double> BinFrequencies() const;
};

struct CqtSpectrum {
  Matrix magnitude;              // frames x bins
  std::vector<double> bin_freqs;  // geometric, ascending
};

int NumStftFrames(int num_samples, const StftConfig &cfg);
std::vector<double> HammingWindow(int length);

Matrix StftMagnitude(const AudioBuffer &buffer, const StftConfig &cfg);

double HzToMel(double hz);
double MelToHz(double mel);

FilterBank MakeFilterBank(FilterKind kind, int n_filters, const StftConfig &cfg,
                          int sample_rate);

// Orthonormal DCT-II of `x`, first n_out coefficients.
Vector DctII(std::span<const double> x, int n_out);

// MFCC / IMFCC / LFCC depending on the filterbank kind.
FeatureMatrix FilterbankCepstra(const Matrix &magnitude, const FilterBank &fb, int n_ceps);

// Sub-band centroid magnitude coefficients.
FeatureMatrix Scmc(const Matrix &magnitude, const FilterBank &fb, int n_ceps);

int CqtKernelLength(double freq, double q, int sample_rate);
CqtSpectrum CqtMagnitude(const AudioBuffer &buffer, const CqtConfig &cfg);

// Linear interpolation of `values` (sampled at ascending `freqs`) onto
// n_out points equally spaced between freqs.front() and freqs.back().
std::vector<double> ResampleUniform(std::span<const double> values,
                                    std::span<const double> freqs, int n_out);

FeatureMatrix Cqcc(const CqtSpectrum &cqt, int n_ceps, int n_uniform_bins);

// Long-term average spectrum: log of the per-bin mean power.
Vector Ltas(const Matrix &magnitude);

// Appends regression deltas and accelerations over +-half_width frames with
// edge-frame replication.
FeatureMatrix AddDeltas(const FeatureMatrix &statics, int half_width);

struct CmvnStats {
  Vector mean;
  Vector stddev;
};

// Pooled mean/stddev over all frames of all inputs, reduced in input order.
CmvnStats ComputeCmvnStats(std::span<const FeatureMatrix> corpus);

// Per-dimension (x - mean) / max(stddev, 1e-8).  Without external stats the
// utterance's own statistics are used.
FeatureMatrix Cmvn(const FeatureMatrix &features,
                   const std::optional<CmvnStats> &stats = std::nullopt);

}  // namespace spoofkit

#endif  // SPOOFKIT_FEATURES_H_
