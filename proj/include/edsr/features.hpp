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
#ifndef EDSR_FEATURES_HPP
#define EDSR_FEATURES_HPP

#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "edsr/audio.hpp"
#include "edsr/common.hpp"
#include "edsr/fft.hpp"

namespace edsr {

/// 25 ms window / 20 ms hop at 16 kHz.
struct FrameGeometry {
  int window = 400;
  int hop = 320;

  long frames_for(long samples) const {
    if (samples < window) return 0;
    return (samples - window) / hop + 1;
  }
};

struct LogMelConfig {
  FrameGeometry frames{};
  int n_fft = 512;
  int n_mels = 40;
  double fmin = 20.0;
  double fmax = 7800.0;
  bool cmvn = true;  // per-utterance mean/variance normalization
};

namespace detail {

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular mel filterbank, (n_fft/2 + 1) x n_mels.
inline Eigen::MatrixXd mel_filterbank(const LogMelConfig& cfg, int sample_rate) {
  const int bins = cfg.n_fft / 2 + 1;
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(bins, cfg.n_mels);
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);
  std::vector<double> edges(static_cast<std::size_t>(cfg.n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      (cfg.n_mels + 1));
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double lo = edges[static_cast<std::size_t>(m)];
    const double mid = edges[static_cast<std::size_t>(m) + 1];
    const double hi = edges[static_cast<std::size_t>(m) + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / cfg.n_fft;
      if (f > lo && f < mid)
        fb(k, m) = (f - lo) / (mid - lo);
      else if (f >= mid && f < hi)
        fb(k, m) = (hi - f) / (hi - mid);
    }
  }
  return fb;
}

}  // namespace detail

/// Log-mel filterbank features, one row per frame. Requires 16 kHz audio of
/// at least one window.
inline Eigen::MatrixXd log_mel_features(const Waveform& w,
                                        const LogMelConfig& cfg = LogMelConfig{}) {
  if (w.sample_rate != 16000)
    throw ValidationError("features need 16 kHz audio, got " +
                          std::to_string(w.sample_rate) + " Hz");
  const long T = cfg.frames.frames_for(static_cast<long>(w.samples.size()));
  if (T < 1)
    throw ValidationError("waveform shorter than one analysis window (" +
                          std::to_string(w.samples.size()) + " < " +
                          std::to_string(cfg.frames.window) + " samples)");

  static thread_local std::vector<double> hann;
  if (hann.size() != static_cast<std::size_t>(cfg.frames.window)) {
    hann.resize(static_cast<std::size_t>(cfg.frames.window));
    for (int i = 0; i < cfg.frames.window; ++i)
      hann[static_cast<std::size_t>(i)] =
          0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (cfg.frames.window - 1));
  }
  const Eigen::MatrixXd fb = detail::mel_filterbank(cfg, w.sample_rate);

  Eigen::MatrixXd feats(T, cfg.n_mels);
  std::vector<std::complex<double>> buf;
  for (long t = 0; t < T; ++t) {
    buf.assign(static_cast<std::size_t>(cfg.n_fft), {0.0, 0.0});
    const long off = t * cfg.frames.hop;
    for (int i = 0; i < cfg.frames.window; ++i)
      buf[static_cast<std::size_t>(i)] = {
          w.samples[static_cast<std::size_t>(off + i)] * hann[static_cast<std::size_t>(i)], 0.0};
    fft_inplace(buf);
    Eigen::VectorXd power(cfg.n_fft / 2 + 1);
    for (int k = 0; k <= cfg.n_fft / 2; ++k) power(k) = std::norm(buf[static_cast<std::size_t>(k)]);
    const Eigen::VectorXd mel = fb.transpose() * power;
    for (int m = 0; m < cfg.n_mels; ++m) feats(t, m) = std::log(mel(m) + 1e-10);
  }

  if (cfg.cmvn) {
    const Eigen::RowVectorXd mean = feats.colwise().mean();
    feats.rowwise() -= mean;
    Eigen::RowVectorXd var = feats.array().square().colwise().mean();
    for (int m = 0; m < cfg.n_mels; ++m)
      feats.col(m) /= std::sqrt(var(m) + 1e-8);
  }
  return feats;
}

}  // namespace edsr

#endif  // EDSR_FEATURES_HPP
