// include/spoofkit/binary-io.h

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

#ifndef SPOOFKIT_BINARY_IO_H_
#define SPOOFKIT_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "spoofkit/base.h"

namespace spoofkit {

static_assert(std::endian::native == std::endian::little,
              "binary containers are written little-endian; add byte swapping for this host");

// Every binary artifact starts with an 8-byte magic, a format version and a
// tag naming what produced it (feature kind, model type).  Readers reject any
// mismatch before touching the payload.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream *os) : os_(os) {}

  void Header(const char (&magic)[9], uint32_t version, const std::string &tag) {
    os_->write(magic, 8);
    U32(version);
    String(tag);
  }
  void U8(uint8_t v) { Raw(&v, 1); }
  void U32(uint32_t v) { Raw(&v, 4); }
  void U64(uint64_t v) { Raw(&v, 8); }
  void F32(float v) { Raw(&v, 4); }
  void F64(double v) { Raw(&v, 8); }
  void String(const std::string &s) {
    U32(static_cast<uint32_t>(s.size()));
    Raw(s.data(), s.size());
  }
  void F64Matrix(const Matrix &m) {
    U64(static_cast<uint64_t>(m.rows()));
    U64(static_cast<uint64_t>(m.cols()));
    Raw(m.data(), sizeof(double) * m.size());
  }
  void F64Vector(const Vector &v) {
    U64(static_cast<uint64_t>(v.size()));
    Raw(v.data(), sizeof(double) * v.size());
  }

 private:
  void Raw(const void *p, size_t n) {
    os_->write(static_cast<const char *>(p), static_cast<std::streamsize>(n));
    if (!*os_) throw Error("write failed");
  }
  std::ostream *os_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream *is) : is_(is) {}

  // Returns the tag.
  std::string Header(const char (&magic)[9], uint32_t version) {
    char got[8];
    Raw(got, 8);
    if (std::memcmp(got, magic, 8) != 0)
      throw Error(std::string("bad magic, expected ") + magic);
    const uint32_t v = U32();
    if (v != version)
      throw Error("unsupported format version " + std::to_string(v) + " (expected " +
                  std::to_string(version) + ")");
    return String();
  }
  uint8_t U8() { uint8_t v; Raw(&v, 1); return v; }
  uint32_t U32() { uint32_t v; Raw(&v, 4); return v; }
  uint64_t U64() { uint64_t v; Raw(&v, 8); return v; }
  float F32() { float v; Raw(&v, 4); return v; }
  double F64() { double v; Raw(&v, 8); return v; }
  std::string String() {
    const uint32_t n = U32();
    if (n > (1u << 20)) throw Error("implausible string length in binary file");
    std::string s(n, '\0');
    Raw(s.data(), n);
    return s;
  }
  Matrix F64Matrix() {
    const uint64_t r = U64(), c = U64();
    if (r > (1ull << 32) || c > (1ull << 32)) throw Error("implausible matrix size");
    Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    Raw(m.data(), sizeof(double) * m.size());
    return m;
  }
  Vector F64Vector() {
    const uint64_t n = U64();
    if (n > (1ull << 32)) throw Error("implausible vector size");
    Vector v(static_cast<Eigen::Index>(n));
    Raw(v.data(), sizeof(double) * v.size());
    return v;
  }

 private:
  void Raw(void *p, size_t n) {
    is_->read(static_cast<char *>(p), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(is_->gcount()) != n) throw Error("truncated binary file");
  }
  std::istream *is_;
};

}  // namespace spoofkit

#endif  // SPOOFKIT_BINARY_IO_H_
