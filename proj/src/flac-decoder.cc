// src/flac-decoder.cc

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

// Decoder for the subset of FLAC that the toolkit consumes: mono streams of
// 4 to 24 bits per sample.  All subframe types (CONSTANT, VERBATIM, FIXED,
// LPC) and both Rice residual codings are handled; frame CRCs are verified.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spoofkit/audio-io.h"
#include "spoofkit/base.h"

namespace spoofkit {

namespace {

class BitReader {
 public:
  explicit BitReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  uint32_t Bits(int n) {
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | Bit();
    return static_cast<uint32_t>(v);
  }

  uint64_t Bits64(int n) {
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | Bit();
    return v;
  }

  int64_t Signed(int n) {
    if (n == 0) return 0;
    const uint64_t v = Bits64(n);
    const uint64_t sign = 1ull << (n - 1);
    return static_cast<int64_t>(v ^ sign) - static_cast<int64_t>(sign);
  }

  uint32_t Unary() {
    uint32_t zeros = 0;
    while (Bit() == 0) ++zeros;
    return zeros;
  }

  void AlignToByte() { bit_ = (bit_ + 7) & ~size_t{7}; }

  size_t BytePos() const { return bit_ >> 3; }
  bool AtEnd() const { return BytePos() >= bytes_.size(); }
  void SeekByte(size_t pos) { bit_ = pos << 3; }

 private:
  uint32_t Bit() {
    const size_t byte = bit_ >> 3;
    if (byte >= bytes_.size()) throw Error("truncated FLAC stream");
    const uint32_t b = (bytes_[byte] >> (7 - (bit_ & 7))) & 1u;
    ++bit_;
    return b;
  }

  std::span<const uint8_t> bytes_;
  size_t bit_ = 0;
};

uint8_t Crc8(std::span<const uint8_t> data) {
  uint8_t crc = 0;
  for (uint8_t byte : data) {
    crc ^= byte;
    for (int i = 0; i < 8; ++i)
      crc = (crc & 0x80) ? static_cast<uint8_t>((crc << 1) ^ 0x07) : static_cast<uint8_t>(crc << 1);
  }
  return crc;
}

uint16_t Crc16(std::span<const uint8_t> data) {
  uint16_t crc = 0;
  for (uint8_t byte : data) {
    crc ^= static_cast<uint16_t>(byte << 8);
    for (int i = 0; i < 8; ++i)
      crc = (crc & 0x8000) ? static_cast<uint16_t>((crc << 1) ^ 0x8005) : static_cast<uint16_t>(crc << 1);
  }
  return crc;
}

struct StreamInfo {
  int sample_rate = 0;
  int channels = 0;
  int bits_per_sample = 0;
  uint64_t total_samples = 0;
};

void DecodeResidual(BitReader *br, int block_size, int order, int64_t *out) {
  const uint32_t method = br->Bits(2);
  if (method > 1) throw Error("reserved FLAC residual coding method");
  const int param_bits = method == 0 ? 4 : 5;
  const uint32_t escape = method == 0 ? 15 : 31;
  const int partition_order = static_cast<int>(br->Bits(4));
  const int partitions = 1 << partition_order;
  if ((block_size >> partition_order) < order ||
      (block_size % partitions) != 0)
    throw Error("invalid FLAC residual partition order");
  int idx = 0;
  for (int p = 0; p < partitions; ++p) {
    const int count = (block_size >> partition_order) - (p == 0 ? order : 0);
    const uint32_t param = br->Bits(param_bits);
    if (param == escape) {
      const int raw_bits = static_cast<int>(br->Bits(5));
      for (int i = 0; i < count; ++i) out[idx++] = br->Signed(raw_bits);
    } else {
      for (int i = 0; i < count; ++i) {
        const uint64_t q = br->Unary();
        const uint64_t u = (q << param) | br->Bits(static_cast<int>(param));
        out[idx++] = static_cast<int64_t>(u >> 1) ^ -static_cast<int64_t>(u & 1);
      }
    }
  }
}

void DecodeSubframe(BitReader *br, int block_size, int bps, std::vector<int64_t> *out) {
  if (br->Bits(1) != 0) throw Error("corrupt FLAC subframe padding");
  const uint32_t type = br->Bits(6);
  int wasted = 0;
  if (br->Bits(1)) wasted = static_cast<int>(br->Unary()) + 1;
  const int eff_bps = bps - wasted;
  if (eff_bps <= 0) throw Error("invalid FLAC wasted-bits count");
  out->assign(block_size, 0);
  int64_t *s = out->data();

  if (type == 0) {
    const int64_t v = br->Signed(eff_bps);
    for (int i = 0; i < block_size; ++i) s[i] = v;
  } else if (type == 1) {
    for (int i = 0; i < block_size; ++i) s[i] = br->Signed(eff_bps);
  } else if (type >= 8 && type <= 12) {
    const int order = static_cast<int>(type - 8);
    if (order > block_size) throw Error("FLAC predictor order exceeds block size");
    for (int i = 0; i < order; ++i) s[i] = br->Signed(eff_bps);
    DecodeResidual(br, block_size, order, s + order);
    for (int i = order; i < block_size; ++i) {
      switch (order) {
        case 0: break;
        case 1: s[i] += s[i - 1]; break;
        case 2: s[i] += 2 * s[i - 1] - s[i - 2]; break;
        case 3: s[i] += 3 * s[i - 1] - 3 * s[i - 2] + s[i - 3]; break;
        case 4: s[i] += 4 * s[i - 1] - 6 * s[i - 2] + 4 * s[i - 3] - s[i - 4]; break;
      }
    }
  } else if (type >= 32) {
    const int order = static_cast<int>(type - 31);
    if (order > block_size) throw Error("FLAC predictor order exceeds block size");
    for (int i = 0; i < order; ++i) s[i] = br->Signed(eff_bps);
    const uint32_t precision = br->Bits(4) + 1;
    if (precision == 16) throw Error("invalid FLAC LPC precision");
    const int shift = static_cast<int>(br->Signed(5));
    if (shift < 0) throw Error("negative FLAC LPC shift");
    std::vector<int64_t> coefs(order);
    for (int i = 0; i < order; ++i) coefs[i] = br->Signed(static_cast<int>(precision));
    DecodeResidual(br, block_size, order, s + order);
    for (int i = order; i < block_size; ++i) {
      int64_t acc = 0;
      for (int j = 0; j < order; ++j) acc += coefs[j] * s[i - j - 1];
      s[i] += acc >> shift;
    }
  } else {
    throw Error("reserved FLAC subframe type " + std::to_string(type));
  }
  if (wasted > 0)
    for (int i = 0; i < block_size; ++i) s[i] <<= wasted;
}

// Returns false at a clean end of stream.
bool DecodeFrame(std::span<const uint8_t> bytes, BitReader *br, const StreamInfo &info,
                 std::vector<int64_t> *pcm) {
  if (br->AtEnd()) return false;
  const size_t frame_start = br->BytePos();
  const uint32_t sync = br->Bits(14);
  if (sync != 0x3FFE) throw Error("lost FLAC frame sync");
  if (br->Bits(1) != 0) throw Error("reserved bit set in FLAC frame header");
  br->Bits(1);  // blocking strategy
  const uint32_t bs_code = br->Bits(4);
  const uint32_t sr_code = br->Bits(4);
  const uint32_t channel_code = br->Bits(4);
  const uint32_t ss_code = br->Bits(3);
  if (br->Bits(1) != 0) throw Error("reserved bit set in FLAC frame header");

  // UTF-8 style coded frame/sample number.
  uint32_t first = br->Bits(8);
  int extra = 0;
  if (first & 0x80) {
    if ((first & 0xE0) == 0xC0) extra = 1;
    else if ((first & 0xF0) == 0xE0) extra = 2;
    else if ((first & 0xF8) == 0xF0) extra = 3;
    else if ((first & 0xFC) == 0xF8) extra = 4;
    else if ((first & 0xFE) == 0xFC) extra = 5;
    else if (first == 0xFE) extra = 6;
    else throw Error("invalid FLAC frame number encoding");
  }
  for (int i = 0; i < extra; ++i)
    if ((br->Bits(8) & 0xC0) != 0x80) throw Error("invalid FLAC frame number encoding");

  int block_size = 0;
  if (bs_code == 0) throw Error("reserved FLAC block size code");
  else if (bs_code == 1) block_size = 192;
  else if (bs_code <= 5) block_size = 576 << (bs_code - 2);
  else if (bs_code == 6) block_size = static_cast<int>(br->Bits(8)) + 1;
  else if (bs_code == 7) block_size = static_cast<int>(br->Bits(16)) + 1;
  else block_size = 256 << (bs_code - 8);

  if (sr_code == 12) br->Bits(8);
  else if (sr_code == 13 || sr_code == 14) br->Bits(16);
  else if (sr_code == 15) throw Error("invalid FLAC sample rate code");

  const size_t header_end = br->BytePos();
  const uint8_t crc8 = static_cast<uint8_t>(br->Bits(8));
  if (Crc8(bytes.subspan(frame_start, header_end - frame_start)) != crc8)
    throw Error("FLAC frame header CRC mismatch");

  if (channel_code != 0)
    throw Error("unsupported channel count (mono only)");
  static const int kSampleSizes[8] = {0, 8, 12, -1, 16, 20, 24, 32};
  int bps = kSampleSizes[ss_code];
  if (bps < 0) throw Error("reserved FLAC sample size code");
  if (bps == 0) bps = info.bits_per_sample;
  if (bps != info.bits_per_sample) throw Error("FLAC frame bit depth differs from stream");

  std::vector<int64_t> block;
  DecodeSubframe(br, block_size, bps, &block);
  br->AlignToByte();
  const size_t frame_end = br->BytePos();
  const uint16_t crc16 = static_cast<uint16_t>(br->Bits(16));
  if (Crc16(bytes.subspan(frame_start, frame_end - frame_start)) != crc16)
    throw Error("FLAC frame CRC mismatch");
  pcm->insert(pcm->end(), block.begin(), block.end());
  return true;
}

}  // namespace

AudioBuffer DecodeFlac(std::span<const uint8_t> bytes) {
  size_t pos = 0;
  // Optional ID3v2 prefix.
  if (bytes.size() >= 10 && bytes[0] == 'I' && bytes[1] == 'D' && bytes[2] == '3') {
    const size_t tag = (static_cast<size_t>(bytes[6] & 0x7f) << 21) |
                       (static_cast<size_t>(bytes[7] & 0x7f) << 14) |
                       (static_cast<size_t>(bytes[8] & 0x7f) << 7) | (bytes[9] & 0x7f);
    pos = 10 + tag;
  }
  if (pos + 4 > bytes.size() || bytes[pos] != 'f' || bytes[pos + 1] != 'L' ||
      bytes[pos + 2] != 'a' || bytes[pos + 3] != 'C')
    throw Error("not a FLAC stream");
  BitReader br(bytes);
  br.SeekByte(pos + 4);

  StreamInfo info;
  bool have_info = false, last = false;
  while (!last) {
    last = br.Bits(1) != 0;
    const uint32_t type = br.Bits(7);
    const uint32_t length = br.Bits(24);
    const size_t body = br.BytePos();
    if (body + length > bytes.size()) throw Error("truncated FLAC metadata");
    if (type == 0) {
      if (length < 34) throw Error("short FLAC STREAMINFO block");
      br.Bits(16);  // min block size
      br.Bits(16);  // max block size
      br.Bits(24);  // min frame size
      br.Bits(24);  // max frame size
      info.sample_rate = static_cast<int>(br.Bits(20));
      info.channels = static_cast<int>(br.Bits(3)) + 1;
      info.bits_per_sample = static_cast<int>(br.Bits(5)) + 1;
      info.total_samples = br.Bits64(36);
      have_info = true;
    }
    br.SeekByte(body + length);
  }
  if (!have_info) throw Error("FLAC stream has no STREAMINFO block");
  if (info.channels != 1)
    throw Error("unsupported channel count " + std::to_string(info.channels) + " (mono only)");
  if (info.bits_per_sample < 4 || info.bits_per_sample > 24)
    throw Error("unsupported FLAC bit depth " + std::to_string(info.bits_per_sample));
  if (info.sample_rate <= 0) throw Error("FLAC sample rate is zero");

  std::vector<int64_t> pcm;
  while (DecodeFrame(bytes, &br, info, &pcm)) {
    if (info.total_samples != 0 && pcm.size() >= info.total_samples) break;
  }
  if (info.total_samples != 0 && pcm.size() < info.total_samples)
    throw Error("truncated FLAC stream");
  if (info.total_samples != 0) pcm.resize(info.total_samples);
  if (pcm.empty()) throw Error("empty audio");

  AudioBuffer out;
  out.sample_rate = info.sample_rate;
  const double scale = 1.0 / static_cast<double>(1ll << (info.bits_per_sample - 1));
  out.samples.resize(pcm.size());
  for (size_t i = 0; i < pcm.size(); ++i) out.samples[i] = pcm[i] * scale;
  return out;
}

}  // namespace spoofkit
