/**
 * Copyright 2026 the edsr authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef EDSR_AUDIO_HPP
#define EDSR_AUDIO_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "edsr/common.hpp"

namespace edsr {

/// Mono PCM audio held as doubles in [-1, 1).
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

namespace detail {

template <typename T>
T read_le(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;  // host is little-endian
}

template <typename T>
void write_le(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

inline double i0(double x) {
  // modified Bessel function of the first kind, order 0 (power series)
  double sum = 1.0, term = 1.0;
  const double x2 = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= x2 / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

}  // namespace detail

/// Reads a 16-bit PCM WAV file. Stereo input is downmixed by averaging
/// channels. Other encodings are rejected.
inline Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open wav file: " + path);

  char riff[4], wave[4];
  in.read(riff, 4);
  (void)detail::read_le<std::uint32_t>(in);
  in.read(wave, 4);
  if (!in || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0)
    throw ParseError("not a RIFF/WAVE file: " + path);

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::vector<std::int16_t> raw;

  while (in) {
    char id[4];
    in.read(id, 4);
    if (!in) break;
    const std::uint32_t size = detail::read_le<std::uint32_t>(in);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      format = detail::read_le<std::uint16_t>(in);
      channels = detail::read_le<std::uint16_t>(in);
      rate = detail::read_le<std::uint32_t>(in);
      (void)detail::read_le<std::uint32_t>(in);  // byte rate
      (void)detail::read_le<std::uint16_t>(in);  // block align
      bits = detail::read_le<std::uint16_t>(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw ParseError("wav data chunk before fmt chunk: " + path);
      raw.resize(size / 2);
      in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 2));
      if (!in) throw ParseError("truncated wav data chunk: " + path);
      break;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);  // chunks are word-aligned
    }
  }
  if (!have_fmt) throw ParseError("wav file has no fmt chunk: " + path);
  if (format != 1 || bits != 16)
    throw ValidationError("unsupported wav encoding (want 16-bit PCM): " + path);
  if (channels == 0 || channels > 2)
    throw ValidationError("unsupported channel count " + std::to_string(channels) + ": " + path);

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  if (channels == 1) {
    w.samples.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) w.samples[i] = raw[i] / 32768.0;
  } else {
    w.samples.resize(raw.size() / 2);
    for (std::size_t i = 0; i < w.samples.size(); ++i)
      w.samples[i] = (raw[2 * i] + raw[2 * i + 1]) / 2.0 / 32768.0;
  }
  return w;
}

/// Writes mono 16-bit PCM.
inline void write_wav(const std::string& path, const Waveform& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write wav file: " + path);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  out.write("RIFF", 4);
  detail::write_le<std::uint32_t>(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  detail::write_le<std::uint32_t>(out, 16);
  detail::write_le<std::uint16_t>(out, 1);  // PCM
  detail::write_le<std::uint16_t>(out, 1);  // mono
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(w.sample_rate));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(w.sample_rate * 2));
  detail::write_le<std::uint16_t>(out, 2);
  detail::write_le<std::uint16_t>(out, 16);
  out.write("data", 4);
  detail::write_le<std::uint32_t>(out, data_bytes);
  for (double s : w.samples) {
    double x = s * 32768.0;
    if (x > 32767.0) x = 32767.0;
    if (x < -32768.0) x = -32768.0;
    detail::write_le<std::int16_t>(out, static_cast<std::int16_t>(std::lrint(x)));
  }
  if (!out) throw IoError("write failed: " + path);
}

/// Kaiser-windowed sinc low-pass taps for 2x upsampling. Cutoff sits just
/// below the original Nyquist so the upsampled signal keeps an empty
/// 4-8 kHz band. Gain 2 compensates the zero stuffing.
inline std::vector<double> upsample2_filter(int half_taps = 95, double beta = 10.0,
                                            double cutoff = 0.2375) {
  std::vector<double> h(2 * half_taps + 1);
  const double denom = detail::i0(beta);
  for (int n = -half_taps; n <= half_taps; ++n) {
    const double t = static_cast<double>(n);
    double sinc = (n == 0) ? 2.0 * cutoff
                           : std::sin(2.0 * std::numbers::pi * cutoff * t) /
                                 (std::numbers::pi * t);
    const double r = t / half_taps;
    const double window = detail::i0(beta * std::sqrt(1.0 - r * r)) / denom;
    h[n + half_taps] = 2.0 * sinc * window;
  }
  return h;
}

/// Band-limited 8 kHz -> 16 kHz upsampling (zero stuffing + windowed sinc).
/// 16 kHz input is returned unchanged; anything else is rejected.
inline Waveform resample_to_16k(const Waveform& w) {
  if (w.sample_rate == 16000) return w;
  if (w.sample_rate != 8000)
    throw ValidationError("unsupported sample rate for resampling: " +
                          std::to_string(w.sample_rate) + " Hz (expect 8000 or 16000)");

  static const std::vector<double> h = upsample2_filter();
  const int half = (static_cast<int>(h.size()) - 1) / 2;
  const std::int64_t n_in = static_cast<std::int64_t>(w.samples.size());

  Waveform out;
  out.sample_rate = 16000;
  out.samples.assign(static_cast<std::size_t>(2 * n_in), 0.0);
  // y[m] = sum_k x[k] h[m - 2k]; only taps with (m - j) even and in range hit input
  for (std::int64_t m = 0; m < 2 * n_in; ++m) {
    double acc = 0.0;
    std::int64_t j = -half + (((m + half) & 1) ? 1 : 0);  // j with (m - j) even
    for (; j <= half; j += 2) {
      const std::int64_t k = (m - j) / 2;
      if (k >= 0 && k < n_in) acc += w.samples[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(j + half)];
    }
    out.samples[static_cast<std::size_t>(m)] = acc;
  }
  return out;
}

}  // namespace edsr

#endif  // EDSR_AUDIO_HPP
