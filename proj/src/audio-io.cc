// src/audio-io.cc

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

#include "spoofkit/audio-io.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "spoofkit/base.h"

namespace spoofkit {

namespace {

uint32_t ReadLe32(const uint8_t *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t ReadLe16(const uint8_t *p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void PutLe32(std::vector<uint8_t> *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void PutLe16(std::vector<uint8_t> *out, uint16_t v) {
  out->push_back(static_cast<uint8_t>(v & 0xff));
  out->push_back(static_cast<uint8_t>(v >> 8));
}

void PutTag(std::vector<uint8_t> *out, const char *tag) {
  out->insert(out->end(), tag, tag + 4);
}

bool HasTag(std::span<const uint8_t> bytes, size_t pos, const char *tag) {
  return pos + 4 <= bytes.size() && std::equal(tag, tag + 4, bytes.begin() + pos);
}

}  // namespace

AudioBuffer DecodeWav(std::span<const uint8_t> bytes) {
  if (bytes.size() < 12 || !HasTag(bytes, 0, "RIFF") || !HasTag(bytes, 8, "WAVE"))
    throw Error("not a RIFF/WAVE stream");
  size_t pos = 12;
  bool have_fmt = false;
  int channels = 0, bits = 0;
  uint32_t rate = 0;
  while (pos + 8 <= bytes.size()) {
    const uint8_t *chunk = bytes.data() + pos;
    const uint32_t size = ReadLe32(chunk + 4);
    const size_t body = pos + 8;
    if (HasTag(bytes, pos, "fmt ")) {
      if (size < 16 || body + size > bytes.size()) throw Error("truncated WAV fmt chunk");
      uint16_t format = ReadLe16(bytes.data() + body);
      channels = ReadLe16(bytes.data() + body + 2);
      rate = ReadLe32(bytes.data() + body + 4);
      bits = ReadLe16(bytes.data() + body + 14);
      if (format == 0xFFFE && size >= 26)  // WAVE_FORMAT_EXTENSIBLE
        format = ReadLe16(bytes.data() + body + 24);
      if (format != 1) throw Error("unsupported WAV codec (only PCM is supported)");
      if (bits != 16)
        throw Error("unsupported WAV bit depth " + std::to_string(bits) + " (only 16-bit PCM)");
      if (channels != 1)
        throw Error("unsupported channel count " + std::to_string(channels) + " (mono only)");
      if (rate == 0) throw Error("WAV sample rate is zero");
      have_fmt = true;
    } else if (HasTag(bytes, pos, "data")) {
      if (!have_fmt) throw Error("WAV data chunk precedes fmt chunk");
      if (body + size > bytes.size()) throw Error("truncated WAV data chunk");
      if (size % 2 != 0) throw Error("truncated WAV data chunk (odd byte count)");
      const size_t n = size / 2;
      if (n == 0) throw Error("empty audio");
      AudioBuffer out;
      out.sample_rate = static_cast<int>(rate);
      out.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const auto v = static_cast<int16_t>(ReadLe16(bytes.data() + body + 2 * i));
        out.samples[i] = v / 32768.0;
      }
      return out;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) throw Error("WAV stream has no fmt chunk");
  throw Error("WAV stream has no data chunk");
}

int16_t QuantizeSample(double x) {
  if (!std::isfinite(x) || x < -1.0 || x > 1.0)
    throw Error("sample out of range [-1, 1]: " + std::to_string(x));
  return static_cast<int16_t>(std::lround(x * 32767.0));
}

std::vector<uint8_t> EncodeWav(const AudioBuffer &buffer) {
  if (buffer.sample_rate <= 0) throw Error("sample rate must be positive");
  const size_t data_bytes = buffer.samples.size() * 2;
  if (data_bytes > 0xFFFFFFFFull - 36) throw Error("audio too long for a WAV container");
  std::vector<uint8_t> out;
  out.reserve(44 + data_bytes);
  PutTag(&out, "RIFF");
  PutLe32(&out, static_cast<uint32_t>(36 + data_bytes));
  PutTag(&out, "WAVE");
  PutTag(&out, "fmt ");
  PutLe32(&out, 16);
  PutLe16(&out, 1);
  PutLe16(&out, 1);
  PutLe32(&out, static_cast<uint32_t>(buffer.sample_rate));
  PutLe32(&out, static_cast<uint32_t>(buffer.sample_rate) * 2);
  PutLe16(&out, 2);
  PutLe16(&out, 16);
  PutTag(&out, "data");
  PutLe32(&out, static_cast<uint32_t>(data_bytes));
  for (double x : buffer.samples)
    PutLe16(&out, static_cast<uint16_t>(QuantizeSample(x)));
  return out;
}

AudioBuffer ReadAudio(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open audio file " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  AudioBuffer out;
  try {
    if (HasTag(bytes, 0, "RIFF"))
      out = DecodeWav(bytes);
    else if (HasTag(bytes, 0, "fLaC") || HasTag(bytes, 0, "ID3\x03") ||
             HasTag(bytes, 0, "ID3\x04"))
      out = DecodeFlac(bytes);
    else if (bytes.empty())
      throw Error("empty audio");
    else
      throw Error("unsupported container (expected WAV or FLAC)");
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
  out.source_id = std::filesystem::path(path).stem().string();
  return out;
}

void WriteAudio(const std::string &path, const AudioBuffer &buffer) {
  const std::vector<uint8_t> bytes = EncodeWav(buffer);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

std::string ResolveAudioPath(const std::string &root, const std::string &utterance) {
  const std::filesystem::path base = std::filesystem::path(root) / utterance;
  for (const char *ext : {".flac", ".wav", ""}) {
    std::filesystem::path p = base;
    p += ext;
    if (std::filesystem::is_regular_file(p)) return p.string();
  }
  throw Error("no audio file for " + utterance + " under " + root);
}

}  // namespace spoofkit
