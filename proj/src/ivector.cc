// src/ivector.cc

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

#include "spoofkit/ivector.h"

#include <cmath>
#include <fstream>

#include "spoofkit/binary-io.h"
#include "spoofkit/parallel.h"
#include "spoofkit/random.h"

namespace spoofkit {

namespace {

constexpr char kTvMagic[9] = "SKTVM001";
constexpr uint32_t kTvVersion = 1;

// Per-utterance inputs to the E-step, flattened for GEMMs.
struct BlockInputs {
  Matrix zeroth;          // B x K
  Matrix scaled_centred;  // B x KD: S^-1 (F - N m)
  Matrix centred;         // B x KD: F - N m
};

BlockInputs GatherBlock(const TvModel &tv, const std::vector<SuffStats> &stats, size_t begin, size_t end) {
  const int k = tv.ubm.num_components(), d = tv.ubm.dim();
  const Eigen::Index b = static_cast<Eigen::Index>(end - begin);
  BlockInputs in;
  in.zeroth.resize(b, k);
  in.centred.resize(b, static_cast<Eigen::Index>(k) * d);
  for (Eigen::Index u = 0; u < b; ++u) {
    const SuffStats &s = stats[begin + u];
    in.zeroth.row(u) = s.zeroth.transpose();
    for (int c = 0; c < k; ++c)
      in.centred.row(u).segment(static_cast<Eigen::Index>(c) * d, d) =
          s.first_order.row(c) - s.zeroth(c) * tv.ubm.means.row(c);
  }
  Eigen::RowVectorXd inv_var(static_cast<Eigen::Index>(k) * d);
  for (int c = 0; c < k; ++c)
    inv_var.segment(static_cast<Eigen::Index>(c) * d, d) = tv.ubm.variances.row(c).cwiseInverse();
  in.scaled_centred = in.centred.array().rowwise() * inv_var.array();
  return in;
}

// K x R^2: row k is vec(T_k' S_k^-1 T_k).
Matrix ComponentPrecisions(const TvModel &tv) {
  const int k = tv.ubm.num_components(), d = tv.ubm.dim(), r = tv.rank();
  Matrix out(k, static_cast<Eigen::Index>(r) * r);
  for (int c = 0; c < k; ++c) {
    const auto tk = tv.t.middleRows(static_cast<Eigen::Index>(c) * d, d);
    const Matrix scaled = tv.ubm.variances.row(c).cwiseInverse().asDiagonal() * tk;
    const Matrix p = tk.transpose() * scaled;
    out.row(c) = Eigen::Map<const Eigen::RowVectorXd>(p.data(), p.size());
  }
  return out;
}

struct BlockPosteriors {
  Matrix means;         // B x R
  Matrix second_moment;  // B x R^2: vec(L^-1 + w w')
  double objective = 0.0;
};

BlockPosteriors BlockEStep(const TvModel &tv, const Matrix &precisions, const BlockInputs &in) {
  const int r = tv.rank();
  const Eigen::Index b = in.zeroth.rows();
  const Matrix lin = in.scaled_centred * tv.t;  // B x R
  const Matrix prec_flat = in.zeroth * precisions;  // B x R^2
  BlockPosteriors out;
  out.means.resize(b, r);
  out.second_moment.resize(b, static_cast<Eigen::Index>(r) * r);
  for (Eigen::Index u = 0; u < b; ++u) {
    Matrix l = Eigen::Map<const Matrix>(prec_flat.row(u).data(), r, r);
    l.diagonal().array() += 1.0;
    Eigen::LLT<Matrix> llt(l);
    if (llt.info() != Eigen::Success) throw Error("i-vector posterior precision is not positive definite");
    const Vector bu = lin.row(u).transpose();
    const Vector w = llt.solve(bu);
    Matrix m = llt.solve(Matrix::Identity(r, r));
    m.noalias() += w * w.transpose();
    out.means.row(u) = w.transpose();
    out.second_moment.row(u) = Eigen::Map<const Eigen::RowVectorXd>(m.data(), m.size());
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    out.objective += -0.5 * logdet + 0.5 * bu.dot(w);
  }
  return out;
}

struct Accumulators {
  Matrix a;  // K x R^2
  Matrix c;  // KD x R
  double objective = 0.0;
};

// One pass over all utterances.  Blocks are processed `jobs` at a time and
// folded into the totals in block order.
Accumulators Accumulate(const TvModel &tv, const std::vector<SuffStats> &stats, int block_size, int jobs,
                        bool need_stats) {
  const Matrix precisions = ComponentPrecisions(tv);
  const int r = tv.rank();
  const size_t n_blocks = (stats.size() + block_size - 1) / block_size;
  Accumulators total;
  if (need_stats) {
    total.a = Matrix::Zero(tv.ubm.num_components(), static_cast<Eigen::Index>(r) * r);
    total.c = Matrix::Zero(tv.t.rows(), r);
  }
  const size_t wave = static_cast<size_t>(std::max(1, jobs));
  for (size_t first = 0; first < n_blocks; first += wave) {
    const size_t count = std::min(wave, n_blocks - first);
    std::vector<Accumulators> partial(count);
    ParallelFor(count, jobs, [&](size_t i) {
      const size_t begin = (first + i) * block_size;
      const size_t end = std::min(stats.size(), begin + block_size);
      const BlockInputs in = GatherBlock(tv, stats, begin, end);
      const BlockPosteriors post = BlockEStep(tv, precisions, in);
      partial[i].objective = post.objective;
      if (need_stats) {
        partial[i].a = in.zeroth.transpose() * post.second_moment;
        partial[i].c = in.centred.transpose() * post.means;
      }
    });
    for (const Accumulators &p : partial) {
      total.objective += p.objective;
      if (need_stats) {
        total.a += p.a;
        total.c += p.c;
      }
    }
  }
  return total;
}

void CheckStats(const DiagGmm &ubm, const SuffStats &s) {
  if (s.zeroth.size() != ubm.num_components() || s.first_order.rows() != ubm.num_components() ||
      s.first_order.cols() != ubm.dim())
    throw Error("statistics do not match the UBM shape");
}

}  // namespace

SuffStats BaumWelchStats(const DiagGmm &ubm, const Matrix &frames) {
  if (frames.rows() == 0) throw Error("Baum-Welch statistics of an empty feature matrix");
  ubm.Validate();
  Matrix ll = ubm.ComponentLogLikelihoods(frames);
  const Vector norm = ll.rowwise().maxCoeff();
  ll = ExpPosteriors(ll.colwise() - norm);
  const Vector sums = ll.rowwise().sum();
  ll = sums.cwiseInverse().asDiagonal() * ll;  // responsibilities, T x K
  SuffStats s;
  s.zeroth = ll.colwise().sum().transpose();
  s.first_order = ll.transpose() * frames;
  s.frame_count = static_cast<double>(frames.rows());
  return s;
}

SuffStats BaumWelchStats(const DiagGmm &ubm, const FeatureMatrix &features) {
  if (!ubm.feature_kind.empty() && !features.kind.empty() && ubm.feature_kind != features.kind)
    throw Error("UBM was trained on " + ubm.feature_kind + " features, got " + features.kind);
  return BaumWelchStats(ubm, features.data);
}

void TvModel::Validate() const {
  ubm.Validate();
  if (t.cols() < 1) throw Error("TV rank must be >= 1");
  if (t.rows() != static_cast<Eigen::Index>(ubm.num_components()) * ubm.dim())
    throw Error("TV matrix rows do not match the UBM");
  if (!t.allFinite()) throw Error("TV matrix is not finite");
}

void TvConfig::Validate() const {
  if (rank < 1) throw Error("TV rank must be >= 1");
  if (iters < 0) throw Error("TV iters must be >= 0");
  if (block_size < 1) throw Error("TV block_size must be >= 1");
}

KeyValueList TvConfig::ToKeyValues() const {
  return {{"rank", std::to_string(rank)},
          {"iters", std::to_string(iters)},
          {"seed", std::to_string(seed)},
          {"block_size", std::to_string(block_size)}};
}

TvConfig TvConfig::FromSection(const ConfigSection &s) {
  TvConfig c;
  c.rank = s.Int("rank", c.rank);
  c.iters = s.Int("iters", c.iters);
  c.seed = s.Seed("seed");
  c.block_size = s.Int("block_size", c.block_size);
  c.Validate();
  return c;
}

Matrix IvectorPosterior::Covariance() const {
  return precision.llt().solve(Matrix::Identity(precision.rows(), precision.cols()));
}

IvectorPosterior ComputePosterior(const TvModel &tv, const SuffStats &stats) {
  CheckStats(tv.ubm, stats);
  const int k = tv.ubm.num_components(), d = tv.ubm.dim(), r = tv.rank();
  IvectorPosterior post;
  post.precision = Matrix::Identity(r, r);
  post.linear = Vector::Zero(r);
  for (int c = 0; c < k; ++c) {
    const auto tk = tv.t.middleRows(static_cast<Eigen::Index>(c) * d, d);
    const Vector inv_var = tv.ubm.variances.row(c).cwiseInverse().transpose();
    const Matrix scaled = inv_var.asDiagonal() * tk;
    post.precision.noalias() += stats.zeroth(c) * (tk.transpose() * scaled);
    const Vector centred = (stats.first_order.row(c) - stats.zeroth(c) * tv.ubm.means.row(c)).transpose();
    post.linear.noalias() += scaled.transpose() * centred;
  }
  Eigen::LLT<Matrix> llt(post.precision);
  if (llt.info() != Eigen::Success) throw Error("i-vector posterior precision is not positive definite");
  post.mean = llt.solve(post.linear);
  return post;
}

Vector ExtractIvector(const TvModel &tv, const SuffStats &stats) { return ComputePosterior(tv, stats).mean; }

double TvObjective(const TvModel &tv, const std::vector<SuffStats> &stats, int jobs) {
  for (const SuffStats &s : stats) CheckStats(tv.ubm, s);
  return Accumulate(tv, stats, 64, jobs, false).objective;
}

TvTrainResult TrainTv(const DiagGmm &ubm, const std::vector<SuffStats> &stats, const TvConfig &cfg,
                      const std::optional<Matrix> &init_t) {
  cfg.Validate();
  ubm.Validate();
  if (stats.size() < 2) throw Error("TV training needs at least two utterances");
  for (const SuffStats &s : stats) CheckStats(ubm, s);
  const int k = ubm.num_components(), d = ubm.dim(), r = cfg.rank;
  if (static_cast<long>(r) > static_cast<long>(k) * d) throw Error("TV rank exceeds the supervector dimension");

  TvTrainResult result;
  TvModel &tv = result.model;
  tv.ubm = ubm;
  if (init_t) {
    if (init_t->rows() != static_cast<Eigen::Index>(k) * d || init_t->cols() != r)
      throw Error("initial T has the wrong shape");
    tv.t = *init_t;
  } else {
    const double scale = 0.1 * ubm.variances.array().sqrt().mean();
    Rng rng(cfg.seed);
    tv.t.resize(static_cast<Eigen::Index>(k) * d, r);
    for (Eigen::Index i = 0; i < tv.t.size(); ++i) tv.t.data()[i] = rng.Normal() * scale;
  }

  for (int it = 0; it < cfg.iters; ++it) {
    const Accumulators acc = Accumulate(tv, stats, cfg.block_size, cfg.jobs, true);
    result.trace.push_back(acc.objective);
    for (int c = 0; c < k; ++c) {
      const Matrix a = Eigen::Map<const Matrix>(acc.a.row(c).data(), r, r);
      if (!(a.trace() > 0.0)) continue;  // component never occupied
      Eigen::LLT<Matrix> llt(a);
      if (llt.info() != Eigen::Success) throw Error("TV M-step: singular accumulator");
      const Matrix ck = acc.c.middleRows(static_cast<Eigen::Index>(c) * d, d);
      tv.t.middleRows(static_cast<Eigen::Index>(c) * d, d) = llt.solve(ck.transpose()).transpose();
    }
    if (!tv.t.allFinite()) throw Error("TV M-step produced non-finite values");
  }
  result.trace.push_back(Accumulate(tv, stats, cfg.block_size, cfg.jobs, false).objective);
  return result;
}

Vector FuseIvectors(const std::vector<Vector> &parts) {
  if (parts.empty()) throw Error("no i-vectors to fuse");
  Eigen::Index n = 0;
  for (const Vector &p : parts) n += p.size();
  Vector out(n);
  n = 0;
  for (const Vector &p : parts) {
    out.segment(n, p.size()) = p;
    n += p.size();
  }
  return out;
}

void WriteTv(const std::string &path, const TvModel &model) {
  model.Validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path + " for writing");
  BinaryWriter w(&os);
  w.Header(kTvMagic, kTvVersion, model.ubm.feature_kind);
  w.F64Vector(model.ubm.weights);
  w.F64Matrix(model.ubm.means);
  w.F64Matrix(model.ubm.variances);
  w.F64Matrix(model.t);
}

TvModel ReadTv(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open TV model " + path);
  try {
    BinaryReader r(&is);
    TvModel m;
    m.ubm.feature_kind = r.Header(kTvMagic, kTvVersion);
    m.ubm.weights = r.F64Vector();
    m.ubm.means = r.F64Matrix();
    m.ubm.variances = r.F64Matrix();
    m.t = r.F64Matrix();
    m.Validate();
    return m;
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace spoofkit
