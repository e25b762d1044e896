// include/spoofkit/audio-io.h

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

#ifndef SPOOFKIT_AUDIO_IO_H_
#define SPOOFKIT_AUDIO_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spoofkit {

/// Mono waveform with amplitudes in [-1, 1].  Integer PCM is normalized by
/// 2^(bits-1) on decode.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string source_id;

  size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// Decodes a RIFF/WAVE (16-bit PCM) or FLAC file, detected from its magic
// bytes.  Multichannel input, other bit depths in WAV, truncated streams and
// empty payloads throw Error.  source_id is the file stem.
AudioBuffer ReadAudio(const std::string &path);

// Writes 16-bit PCM WAV; samples are quantized as round(x * 32767).
void WriteAudio(const std::string &path, const AudioBuffer &buffer);

AudioBuffer DecodeWav(std::span<const uint8_t> bytes);
AudioBuffer DecodeFlac(std::span<const uint8_t> bytes);
std::vector<uint8_t> EncodeWav(const AudioBuffer &buffer);

// round(x * 32767) with range checking.
int16_t QuantizeSample(double x);

// Finds <root>/<utterance>.flac, then .wav, then the bare name.
std::string ResolveAudioPath(const std::string &root, const std::string &utterance);

}  // namespace spoofkit

#endif  // SPOOFKIT_AUDIO_IO_H_
