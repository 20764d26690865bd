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
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "edsr/audio.hpp"
#include "edsr/fft.hpp"
#include "test_support.hpp"

using namespace edsr;

namespace {

Waveform sine(double freq, int rate, double seconds, double amp = 0.5) {
  Waveform w;
  w.sample_rate = rate;
  const long n = static_cast<long>(seconds * rate);
  w.samples.resize(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i)
    w.samples[static_cast<std::size_t>(i)] =
        amp * std::sin(2.0 * std::numbers::pi * freq * i / rate);
  return w;
}

}  // namespace

TEST_CASE("wav round-trip preserves samples within quantization", "[audio]") {
  edsr_test::TempDir tmp;
  const Waveform w = sine(440.0, 16000, 0.1);
  write_wav(tmp.file("a.wav"), w);
  const Waveform r = read_wav(tmp.file("a.wav"));
  REQUIRE(r.sample_rate == 16000);
  REQUIRE(r.samples.size() == w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); i += 97)
    REQUIRE(r.samples[i] == Catch::Approx(w.samples[i]).margin(1.0 / 32768.0));
}

TEST_CASE("stereo wav is downmixed by channel averaging", "[audio]") {
  edsr_test::TempDir tmp;
  // hand-built 2-channel file: L = 8192, R = -8192 -> average 0
  std::ofstream out(tmp.file("st.wav"), std::ios::binary);
  auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
  auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };
  const int frames = 10;
  out.write("RIFF", 4);
  u32(36 + frames * 4);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  u32(16);
  u16(1);
  u16(2);
  u32(16000);
  u32(16000 * 4);
  u16(4);
  u16(16);
  out.write("data", 4);
  u32(frames * 4);
  for (int i = 0; i < frames; ++i) {
    std::int16_t l = 8192, r = -8192;
    out.write(reinterpret_cast<char*>(&l), 2);
    out.write(reinterpret_cast<char*>(&r), 2);
  }
  out.close();

  const Waveform w = read_wav(tmp.file("st.wav"));
  REQUIRE(w.samples.size() == static_cast<std::size_t>(frames));
  for (double s : w.samples) REQUIRE(s == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("16 kHz input passes through resampling unchanged", "[audio]") {
  const Waveform w = sine(1000.0, 16000, 0.05);
  const Waveform r = resample_to_16k(w);
  REQUIRE(r.sample_rate == 16000);
  REQUIRE(r.samples == w.samples);
  // idempotence
  const Waveform r2 = resample_to_16k(r);
  REQUIRE(r2.samples == r.samples);
}

TEST_CASE("8 kHz input doubles in length", "[audio]") {
  Waveform w = sine(500.0, 8000, 1.0);
  REQUIRE(w.samples.size() == 8000);
  const Waveform r = resample_to_16k(w);
  REQUIRE(r.sample_rate == 16000);
  REQUIRE(r.samples.size() == 16000);
  REQUIRE(r.duration_s() == Catch::Approx(w.duration_s()));
}

TEST_CASE("upsampled sine keeps its peak and an empty 4-8 kHz band", "[audio]") {
  const Waveform w = sine(1000.0, 8000, 1.0);
  const Waveform r = resample_to_16k(w);
  REQUIRE(r.samples.size() == 16000);

  const std::size_t nfft = next_pow2(r.samples.size());
  const auto spec = power_spectrum(r.samples, nfft);
  const double bin_hz = 16000.0 / static_cast<double>(nfft);

  std::size_t peak_bin = 0;
  for (std::size_t k = 1; k < spec.size(); ++k)
    if (spec[k] > spec[peak_bin]) peak_bin = k;
  REQUIRE(peak_bin * bin_hz == Catch::Approx(1000.0).margin(bin_hz * 1.5));

  double high_energy = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k)
    if (k * bin_hz > 4000.0) high_energy += spec[k];
  const double rel_db = 10.0 * std::log10(high_energy / spec[peak_bin]);
  REQUIRE(rel_db <= -40.0);
}

TEST_CASE("unsupported sample rate is rejected by name", "[audio]") {
  Waveform w = sine(440.0, 44100, 0.01);
  REQUIRE_THROWS_WITH(resample_to_16k(w), Catch::Matchers::ContainsSubstring("44100"));
}

TEST_CASE("fft matches a naive dft", "[audio]") {
  Rng rng(11);
  std::vector<std::complex<double>> a(16);
  for (auto& x : a) x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  auto b = a;
  fft_inplace(b);
  for (std::size_t k = 0; k < a.size(); ++k) {
    std::complex<double> ref{0.0, 0.0};
    for (std::size_t n = 0; n < a.size(); ++n) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * n) / a.size();
      ref += a[n] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    REQUIRE(std::abs(b[k] - ref) < 1e-9);
  }
}
