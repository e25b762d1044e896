// src/features.cc

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

#include "spoofkit/features.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fft.h"

namespace spoofkit {

void StftConfig::Validate() const {
  if (window_length < 1) throw Error("STFT window length must be positive");
  if (hop < 1) throw Error("STFT hop must be >= 1");
  if (fft_size < window_length) throw Error("fft_size must be >= window_length");
}

StftConfig StftConfig::FromMilliseconds(int sample_rate, double window_ms, double hop_ms,
                                        int min_fft_size) {
  StftConfig cfg;
  cfg.window_length = static_cast<int>(std::lround(sample_rate * window_ms / 1000.0));
  cfg.hop = static_cast<int>(std::lround(sample_rate * hop_ms / 1000.0));
  int fft = 1;
  while (fft < std::max(cfg.window_length, min_fft_size)) fft <<= 1;
  cfg.fft_size = fft;
  cfg.Validate();
  return cfg;
}

std::string ToString(FilterKind kind) {
  switch (kind) {
    case FilterKind::kMel: return "mel";
    case FilterKind::kInvertedMel: return "inverted-mel";
    case FilterKind::kLinear: return "linear";
  }
  return "unknown";
}

FilterKind FilterKindFromString(const std::string &name) {
  if (name == "mel") return FilterKind::kMel;
  if (name == "inverted-mel") return FilterKind::kInvertedMel;
  if (name == "linear") return FilterKind::kLinear;
  throw Error("unknown filterbank kind '" + name + "'");
}

void FeatureMatrix::Validate() const {
  if (!data.allFinite()) throw Error("feature matrix '" + kind + "' has non-finite entries");
  if (includes_deltas && dims() != 3 * n_static)
    throw Error("feature matrix '" + kind + "' has " + std::to_string(dims()) +
                " dims, expected 3 x " + std::to_string(n_static));
  if (!includes_deltas && n_static != 0 && dims() != n_static)
    throw Error("feature matrix '" + kind + "' dims disagree with n_static");
}

int NumStftFrames(int num_samples, const StftConfig &cfg) {
  if (num_samples < cfg.window_length) return 0;
  return (num_samples - cfg.window_length) / cfg.hop + 1;
}

std::vector<double> HammingWindow(int length) {
  std::vector<double> w(length, 1.0);
  if (length == 1) return w;
  for (int n = 0; n < length; ++n)
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (length - 1));
  return w;
}

Matrix StftMagnitude(const AudioBuffer &buffer, const StftConfig &cfg) {
  cfg.Validate();
  const int n = static_cast<int>(buffer.samples.size());
  const int frames = NumStftFrames(n, cfg);
  if (frames == 0)
    throw Error("buffer of " + std::to_string(n) + " samples is shorter than one " +
                std::to_string(cfg.window_length) + "-sample window");
  const std::vector<double> window = HammingWindow(cfg.window_length);
  RealFft fft(cfg.fft_size);
  std::vector<double> frame(cfg.fft_size, 0.0);
  std::vector<std::complex<double>> spec(cfg.num_bins());
  Matrix mag(frames, cfg.num_bins());
  for (int t = 0; t < frames; ++t) {
    const double *seg = buffer.samples.data() + static_cast<size_t>(t) * cfg.hop;
    for (int i = 0; i < cfg.window_length; ++i) frame[i] = seg[i] * window[i];
    std::fill(frame.begin() + cfg.window_length, frame.end(), 0.0);
    fft.Forward(frame, spec);
    for (int b = 0; b < cfg.num_bins(); ++b) mag(t, b) = std::abs(spec[b]);
  }
  return mag;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

namespace {

// Triangles over consecutive edge triples, evaluated at bin frequencies.
Matrix TriangularFilters(const std::vector<double> &edges, const std::vector<double> &bin_freqs) {
  const int n_filters = static_cast<int>(edges.size()) - 2;
  Matrix w = Matrix::Zero(n_filters, static_cast<Eigen::Index>(bin_freqs.size()));
  for (int m = 0; m < n_filters; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (size_t k = 0; k < bin_freqs.size(); ++k) {
      const double f = bin_freqs[k];
      if (f > lo && f <= mid)
        w(m, k) = (f - lo) / (mid - lo);
      else if (f > mid && f < hi)
        w(m, k) = (hi - f) / (hi - mid);
    }
  }
  return w;
}

}  // namespace

FilterBank MakeFilterBank(FilterKind kind, int n_filters, const StftConfig &cfg,
                          int sample_rate) {
  cfg.Validate();
  if (n_filters < 2) throw Error("a filterbank needs at least 2 filters");
  if (sample_rate <= 0) throw Error("sample rate must be positive");
  const int bins = cfg.num_bins();
  const double nyquist = sample_rate / 2.0;

  FilterBank fb;
  fb.kind = kind;
  fb.bin_freqs.resize(bins);
  for (int k = 0; k < bins; ++k)
    fb.bin_freqs[k] = static_cast<double>(k) * sample_rate / cfg.fft_size;

  std::vector<double> edges(n_filters + 2);
  if (kind == FilterKind::kLinear) {
    for (int i = 0; i < n_filters + 2; ++i) edges[i] = nyquist * i / (n_filters + 1);
    fb.weights = TriangularFilters(edges, fb.bin_freqs);
    fb.center_freqs.assign(edges.begin() + 1, edges.end() - 1);
  } else {
    const double mel_top = HzToMel(nyquist);
    for (int i = 0; i < n_filters + 2; ++i) edges[i] = MelToHz(mel_top * i / (n_filters + 1));
    const Matrix mel = TriangularFilters(edges, fb.bin_freqs);
    if (kind == FilterKind::kMel) {
      fb.weights = mel;
      fb.center_freqs.assign(edges.begin() + 1, edges.end() - 1);
    } else {
      // Filter i is filter (n-1-i) of the mel bank mirrored about Nyquist/2.
      fb.weights = mel.colwise().reverse().rowwise().reverse();
      fb.center_freqs.resize(n_filters);
      for (int i = 0; i < n_filters; ++i)
        fb.center_freqs[i] = nyquist - edges[n_filters - i];
    }
  }
  for (int m = 0; m < n_filters; ++m)
    if (!(fb.weights.row(m).maxCoeff() > 0.0))
      throw Error("filter " + std::to_string(m) + " of " + std::to_string(n_filters) + " " +
                  ToString(kind) + " filters is empty at fft_size " +
                  std::to_string(cfg.fft_size));
  return fb;
}

Vector DctII(std::span<const double> x, int n_out) {
  const int m = static_cast<int>(x.size());
  if (n_out < 1 || n_out > m) throw Error("DCT output size must be in [1, input size]");
  Vector c(n_out);
  const double s0 = std::sqrt(1.0 / m), sk = std::sqrt(2.0 / m);
  for (int k = 0; k < n_out; ++k) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i)
      acc += x[i] * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * m));
    c(k) = (k == 0 ? s0 : sk) * acc;
  }
  return c;
}

namespace {

// Row-wise DCT of log(max(values, floor)), with a cached basis.
Matrix LogDct(const Matrix &values, int n_ceps) {
  const int m = static_cast<int>(values.cols());
  if (n_ceps < 1 || n_ceps > m) throw Error("n_ceps must be in [1, number of bands]");
  Matrix basis(n_ceps, m);
  const double s0 = std::sqrt(1.0 / m), sk = std::sqrt(2.0 / m);
  for (int k = 0; k < n_ceps; ++k)
    for (int i = 0; i < m; ++i)
      basis(k, i) = (k == 0 ? s0 : sk) *
                    std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * m));
  Matrix logs = values.unaryExpr([](double v) { return std::log(std::max(v, kLogFloor)); });
  return logs * basis.transpose();
}

void CheckBins(const Matrix &magnitude, const FilterBank &fb) {
  if (magnitude.cols() != fb.num_bins())
    throw Error("magnitude has " + std::to_string(magnitude.cols()) +
                " bins but the filterbank expects " + std::to_string(fb.num_bins()));
}

std::string CepstrumName(FilterKind kind) {
  switch (kind) {
    case FilterKind::kMel: return "mfcc";
    case FilterKind::kInvertedMel: return "imfcc";
    case FilterKind::kLinear: return "lfcc";
  }
  return "cepstra";
}

}  // namespace

FeatureMatrix FilterbankCepstra(const Matrix &magnitude, const FilterBank &fb, int n_ceps) {
  CheckBins(magnitude, fb);
  const Matrix energies = magnitude.array().square().matrix() * fb.weights.transpose();
  FeatureMatrix out;
  out.kind = CepstrumName(fb.kind);
  out.n_static = n_ceps;
  out.data = LogDct(energies, n_ceps);
  return out;
}

FeatureMatrix Scmc(const Matrix &magnitude, const FilterBank &fb, int n_ceps) {
  CheckBins(magnitude, fb);
  // Filter weights pre-multiplied by bin frequency.
  Matrix wf = fb.weights;
  for (int k = 0; k < fb.num_bins(); ++k) wf.col(k) *= fb.bin_freqs[k];
  const Vector denom = wf.rowwise().sum();
  Matrix centroid = magnitude * wf.transpose();
  for (int m = 0; m < fb.num_filters(); ++m) {
    if (denom(m) > 0.0)
      centroid.col(m) /= denom(m);
    else
      centroid.col(m).setZero();
  }
  FeatureMatrix out;
  out.kind = "scmc";
  out.n_static = n_ceps;
  out.data = LogDct(centroid, n_ceps);
  return out;
}

void CqtConfig::Validate(int sample_rate) const {
  if (bins_per_octave < 1) throw Error("bins_per_octave must be >= 1");
  if (!(f_min > 0.0) || !(f_min < f_max)) throw Error("CQT needs 0 < f_min < f_max");
  if (f_max > sample_rate / 2.0 + 1e-9) throw Error("CQT f_max exceeds Nyquist");
  if (hop < 1) throw Error("CQT hop must be >= 1");
}

double CqtConfig::q_factor() const { return 1.0 / (std::exp2(1.0 / bins_per_octave) - 1.0); }

std::vector<double> CqtConfig::BinFrequencies() const {
  std::vector<double> freqs;
  for (int j = 0;; ++j) {
    const double f = f_min * std::exp2(static_cast<double>(j) / bins_per_octave);
    if (f >= f_max * (1.0 - 1e-12)) break;
    freqs.push_back(f);
  }
  return freqs;
}

int CqtKernelLength(double freq, double q, int sample_rate) {
  return static_cast<int>(std::ceil(q * sample_rate / freq));
}

namespace {

// Prefix sums P(m) = sum_{i<m} x(i) exp(-i nu i).
void ModulatedPrefix(const std::vector<double> &x, double nu,
                     std::vector<std::complex<double>> *prefix) {
  const size_t n = x.size();
  prefix->resize(n + 1);
  (*prefix)[0] = 0.0;
  const std::complex<double> step = std::polar(1.0, -nu);
  std::complex<double> phase = 1.0;
  std::complex<double> acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if ((i & 1023) == 0) phase = std::polar(1.0, -nu * static_cast<double>(i));
    acc += x[i] * phase;
    (*prefix)[i + 1] = acc;
    phase *= step;
  }
}

}  // namespace

// Each bin is the inner product of the signal with a Hann-windowed complex
// exponential.  The Hann window is a sum of three complex exponentials, so
// every inner product is a combination of three modulated window sums, each
// read off a prefix-sum array in O(1).
CqtSpectrum CqtMagnitude(const AudioBuffer &buffer, const CqtConfig &cfg) {
  cfg.Validate(buffer.sample_rate);
  const int sr = buffer.sample_rate;
  const int n = static_cast<int>(buffer.samples.size());
  if (n == 0) throw Error("empty audio");
  CqtSpectrum out;
  out.bin_freqs = cfg.BinFrequencies();
  const int bins = static_cast<int>(out.bin_freqs.size());
  if (bins < 1) throw Error("CQT configuration yields no bins");
  const double q = cfg.q_factor();
  const int longest = CqtKernelLength(out.bin_freqs.front(), q, sr);

  int frames = 0;
  int first_center = 0;
  if (cfg.zero_extend) {
    frames = (n - 1) / cfg.hop + 1;
  } else {
    if (n < longest)
      throw Error("f_min kernel (" + std::to_string(longest) +
                  " samples) is longer than the signal (" + std::to_string(n) + ")");
    frames = (n - longest) / cfg.hop + 1;
    first_center = longest / 2;
  }
  out.magnitude.resize(frames, bins);

  std::vector<std::complex<double>> p0, pm, pp;
  for (int j = 0; j < bins; ++j) {
    const int len = CqtKernelLength(out.bin_freqs[j], q, sr);
    const double omega = 2.0 * std::numbers::pi * out.bin_freqs[j] / sr;
    const double delta = len > 1 ? 2.0 * std::numbers::pi / (len - 1) : 0.0;
    ModulatedPrefix(buffer.samples, omega, &p0);
    if (len > 1) {
      ModulatedPrefix(buffer.samples, omega - delta, &pm);
      ModulatedPrefix(buffer.samples, omega + delta, &pp);
    }
    // Window sum S(nu) = sum_n x(s+n) exp(-i nu n) = exp(i nu s) (P(e) - P(b)).
    auto window_sum = [&](const std::vector<std::complex<double>> &p, double nu, long s) {
      const long b = std::max(0L, s);
      const long e = std::min<long>(n, s + len);
      if (e <= b) return std::complex<double>(0.0);
      return std::polar(1.0, nu * static_cast<double>(s)) * (p[e] - p[b]);
    };
    for (int t = 0; t < frames; ++t) {
      const long start = static_cast<long>(first_center) + static_cast<long>(t) * cfg.hop - len / 2;
      std::complex<double> v;
      if (len > 1)
        v = 0.5 * window_sum(p0, omega, start) - 0.25 * window_sum(pm, omega - delta, start) -
            0.25 * window_sum(pp, omega + delta, start);
      else
        v = window_sum(p0, omega, start);
      out.magnitude(t, j) = std::abs(v) / len;
    }
  }
  return out;
}

std::vector<double> ResampleUniform(std::span<const double> values,
                                    std::span<const double> freqs, int n_out) {
  const size_t n_in = values.size();
  if (n_in != freqs.size()) throw Error("values and frequencies differ in length");
  if (n_in < 2 || n_out < 2) throw Error("resampling needs at least two points");
  for (size_t i = 1; i < n_in; ++i)
    if (!(freqs[i] > freqs[i - 1])) throw Error("resampling axis must be strictly increasing");
  std::vector<double> out(n_out);
  const double lo = freqs.front(), hi = freqs.back();
  size_t seg = 0;
  for (int i = 0; i < n_out; ++i) {
    const double u = i == n_out - 1 ? hi : lo + (hi - lo) * i / (n_out - 1);
    while (seg + 2 < n_in && freqs[seg + 1] < u) ++seg;
    const double f0 = freqs[seg], f1 = freqs[seg + 1];
    const double a = std::clamp((u - f0) / (f1 - f0), 0.0, 1.0);
    out[i] = a == 0.0 ? values[seg] : (a == 1.0 ? values[seg + 1] : (1.0 - a) * values[seg] + a * values[seg + 1]);
  }
  return out;
}

FeatureMatrix Cqcc(const CqtSpectrum &cqt, int n_ceps, int n_uniform_bins) {
  if (cqt.magnitude.rows() == 0 || cqt.magnitude.cols() == 0)
    throw Error("empty constant-Q spectrum");
  if (n_uniform_bins < n_ceps)
    throw Error("n_uniform_bins (" + std::to_string(n_uniform_bins) + ") < n_ceps (" +
                std::to_string(n_ceps) + ")");
  const int frames = static_cast<int>(cqt.magnitude.rows());
  const int bins = static_cast<int>(cqt.magnitude.cols());
  Matrix uniform(frames, n_uniform_bins);
  std::vector<double> logpow(bins);
  for (int t = 0; t < frames; ++t) {
    for (int j = 0; j < bins; ++j) {
      const double m = cqt.magnitude(t, j);
      logpow[j] = std::log(std::max(m * m, kLogFloor));
    }
    const std::vector<double> row = ResampleUniform(logpow, cqt.bin_freqs, n_uniform_bins);
    for (int i = 0; i < n_uniform_bins; ++i) uniform(t, i) = row[i];
  }
  // The DCT operates on values that are already logarithmic.
  FeatureMatrix out;
  out.kind = "cqcc";
  out.n_static = n_ceps;
  Matrix basis(n_ceps, n_uniform_bins);
  const double s0 = std::sqrt(1.0 / n_uniform_bins), sk = std::sqrt(2.0 / n_uniform_bins);
  for (int k = 0; k < n_ceps; ++k)
    for (int i = 0; i < n_uniform_bins; ++i)
      basis(k, i) = (k == 0 ? s0 : sk) *
                    std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n_uniform_bins));
  out.data = uniform * basis.transpose();
  return out;
}

Vector Ltas(const Matrix &magnitude) {
  if (magnitude.rows() == 0) throw Error("LTAS needs at least one frame");
  Vector mean_power = magnitude.array().square().colwise().mean().transpose();
  return mean_power.unaryExpr([](double v) { return std::log(std::max(v, kLogFloor)); });
}

namespace {

Matrix Regress(const Matrix &c, int half_width) {
  const int frames = static_cast<int>(c.rows());
  double norm = 0.0;
  for (int n = 1; n <= half_width; ++n) norm += n * n;
  norm *= 2.0;
  Matrix d = Matrix::Zero(frames, c.cols());
  for (int t = 0; t < frames; ++t) {
    for (int n = 1; n <= half_width; ++n) {
      const int ahead = std::min(t + n, frames - 1);
      const int behind = std::max(t - n, 0);
      d.row(t) += n * (c.row(ahead) - c.row(behind));
    }
  }
  return d / norm;
}

}  // namespace

FeatureMatrix AddDeltas(const FeatureMatrix &statics, int half_width) {
  if (statics.frames() < 1) throw Error("deltas need at least one frame");
  if (half_width < 1) throw Error("delta window half-width must be >= 1");
  const int d = statics.dims();
  const Matrix delta = Regress(statics.data, half_width);
  const Matrix accel = Regress(delta, half_width);
  FeatureMatrix out;
  out.kind = statics.kind;
  out.n_static = d;
  out.includes_deltas = true;
  out.data.resize(statics.frames(), 3 * d);
  out.data.leftCols(d) = statics.data;
  out.data.middleCols(d, d) = delta;
  out.data.rightCols(d) = accel;
  return out;
}

CmvnStats ComputeCmvnStats(std::span<const FeatureMatrix> corpus) {
  if (corpus.empty()) throw Error("CMVN statistics need at least one utterance");
  const int dims = corpus.front().dims();
  // Chan et al. pairwise combination, applied in input order.
  double count = 0.0;
  Vector mean = Vector::Zero(dims), m2 = Vector::Zero(dims);
  for (const FeatureMatrix &f : corpus) {
    if (f.dims() != dims) throw Error("CMVN statistics over mismatched dimensions");
    if (f.frames() == 0) continue;
    const double nb = f.frames();
    const Vector mb = f.data.colwise().mean().transpose();
    const Vector m2b = (f.data.rowwise() - mb.transpose()).array().square().colwise().sum().transpose();
    const Vector delta = mb - mean;
    const double total = count + nb;
    mean += delta * (nb / total);
    m2 += m2b + delta.cwiseProduct(delta) * (count * nb / total);
    count = total;
  }
  if (count == 0.0) throw Error("CMVN statistics over zero frames");
  return {mean, (m2 / count).cwiseSqrt()};
}

FeatureMatrix Cmvn(const FeatureMatrix &features, const std::optional<CmvnStats> &stats) {
  CmvnStats s;
  if (stats) {
    if (stats->mean.size() != features.dims() || stats->stddev.size() != features.dims())
      throw Error("CMVN stats have " + std::to_string(stats->mean.size()) +
                  " dims but features have " + std::to_string(features.dims()));
    s = *stats;
  } else {
    if (features.frames() == 0) throw Error("utterance CMVN on an empty matrix");
    s.mean = features.data.colwise().mean().transpose();
    s.stddev = (features.data.rowwise() - s.mean.transpose())
                   .array().square().colwise().mean().sqrt().transpose();
  }
  FeatureMatrix out = features;
  const Vector inv = s.stddev.unaryExpr([](double v) { return 1.0 / std::max(v, kStdFloor); });
  out.data = ((features.data.rowwise() - s.mean.transpose()).array().rowwise() *
              inv.transpose().array()).matrix();
  return out;
}

}  // namespace spoofkit
