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
#ifndef EDSR_SYNTH_HPP
#define EDSR_SYNTH_HPP

#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "edsr/audio.hpp"
#include "edsr/common.hpp"
#include "edsr/emotion.hpp"
#include "edsr/manifest.hpp"

namespace edsr {

/// Toy phonetic world: pseudo-phonemes are distinct formant-like tone
/// stacks, emotions apply a global pitch scale and amplitude envelope,
/// speakers a fixed spectral tilt. Small enough that the whole pipeline
/// trains on a laptop CPU in minutes.
struct SynthSpec {
  int n_pseudo_phonemes = 5;
  EmotionSet emotions{};
  int n_speakers = 6;
  int utterances_per_speaker = 24;
  double unit_ms_min = 120.0;
  double unit_ms_max = 240.0;
  int n_words = 12;
  int word_len_min = 2;
  int word_len_max = 4;
  int utt_words_min = 2;
  int utt_words_max = 4;
  double noise_level = 0.05;
  std::uint64_t seed = 7;
  int sample_rate = 16000;

  void validate() const {
    if (n_pseudo_phonemes < 2) throw ValidationError("need >= 2 pseudo-phonemes");
    if (n_speakers < 2) throw ValidationError("need >= 2 speakers (fold splitting)");
    if (utterances_per_speaker < 1 || n_words < 1)
      throw ValidationError("corpus sizes must be positive");
  }
};

namespace synth_detail {

struct Formants {
  double f[3];
  double a[3];
};

inline Formants phoneme_formants(int p) {
  Formants fm;
  fm.f[0] = 250.0 + 130.0 * p;
  fm.f[1] = 1000.0 + 350.0 * p;
  fm.f[2] = 2800.0 + 240.0 * p;
  fm.a[0] = 1.0;
  fm.a[1] = 0.55;
  fm.a[2] = 0.30;
  return fm;
}

inline double emotion_pitch_scale(int e) {
  static const double k[] = {1.0, 1.08, 1.16, 0.92};
  return k[e % 4];
}

/// Amplitude envelope over normalized unit time u in [0, 1].
inline double emotion_envelope(int e, double u) {
  switch (e % 4) {
    case 0: return 1.0;                                   // flat
    case 1: return 0.65 + 0.70 * u;                       // rising
    case 2: return 1.25 - 0.85 * u;                       // sharp decay
    default: return 0.55 + 0.90 * std::sin(std::numbers::pi * u);  // slow hump
  }
}

inline double speaker_tilt_db_per_khz(int s, int n_speakers) {
  if (n_speakers == 1) return 0.0;
  return -3.0 + 6.0 * static_cast<double>(s) / (n_speakers - 1);
}

}  // namespace synth_detail

/// Ground-truth segmentation of a rendered utterance.
struct UnitSpan {
  int phoneme = 0;
  long start = 0;
  long length = 0;
};

/// Letter suffixes: a trailing digit would read as an ARPAbet stress mark.
inline std::string pseudo_phoneme_symbol(int p) {
  std::string s = "P";
  s += static_cast<char>('A' + p % 26);
  if (p >= 26) s += static_cast<char>('A' + p / 26 - 1);
  return s;
}

inline std::string pseudo_word_symbol(int w) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "W%02d", w);
  return buf;
}

/// Deterministic pseudo-word list: unique phoneme sequences drawn from the
/// master seed (stream 0).
inline std::vector<std::vector<int>> make_pseudo_words(const SynthSpec& spec) {
  Rng rng(mix_seed(spec.seed, 0));
  std::vector<std::vector<int>> words;
  while (static_cast<int>(words.size()) < spec.n_words) {
    const int len = static_cast<int>(rng.uniform_int(spec.word_len_min, spec.word_len_max));
    std::vector<int> w;
    for (int i = 0; i < len; ++i)
      w.push_back(static_cast<int>(rng.uniform_int(0, spec.n_pseudo_phonemes - 1)));
    if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(std::move(w));
  }
  return words;
}

/// Renders one pseudo-phoneme unit: three emotion-scaled, speaker-tilted
/// sinusoids under the emotion envelope, with 5 ms edge fades.
inline std::vector<double> render_unit(const SynthSpec& spec, int phoneme, int emotion_idx,
                                       int speaker_idx, long n_samples, Rng& rng) {
  const auto fm = synth_detail::phoneme_formants(phoneme);
  const double pitch = synth_detail::emotion_pitch_scale(emotion_idx);
  const double tilt = synth_detail::speaker_tilt_db_per_khz(speaker_idx, spec.n_speakers);
  double freq[3], amp[3], phase[3];
  for (int i = 0; i < 3; ++i) {
    freq[i] = fm.f[i] * pitch;
    amp[i] = fm.a[i] * std::pow(10.0, tilt * freq[i] / 1000.0 / 20.0);
    phase[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  const long fade = std::min<long>(n_samples / 4, spec.sample_rate / 200);  // 5 ms
  std::vector<double> out(static_cast<std::size_t>(n_samples));
  for (long t = 0; t < n_samples; ++t) {
    const double u = static_cast<double>(t) / static_cast<double>(n_samples);
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      s += amp[i] * std::sin(2.0 * std::numbers::pi * freq[i] * t / spec.sample_rate + phase[i]);
    double g = synth_detail::emotion_envelope(emotion_idx, u);
    if (t < fade) g *= 0.5 - 0.5 * std::cos(std::numbers::pi * t / fade);
    if (n_samples - 1 - t < fade)
      g *= 0.5 - 0.5 * std::cos(std::numbers::pi * (n_samples - 1 - t) / fade);
    out[static_cast<std::size_t>(t)] = 0.22 * g * s;
  }
  return out;
}

struct RenderedUtterance {
  Waveform audio;
  std::vector<UnitSpan> spans;
};

/// Renders a whole utterance (word indices into the pseudo-word list) with
/// 30 ms leading/trailing silence. The rng stream must be utterance-specific
/// for reproducible parallel generation.
inline RenderedUtterance render_utterance(const SynthSpec& spec,
                                          const std::vector<std::vector<int>>& words,
                                          const std::vector<int>& word_indices,
                                          int emotion_idx, int speaker_idx, Rng& rng) {
  RenderedUtterance r;
  r.audio.sample_rate = spec.sample_rate;
  const long pad = spec.sample_rate * 30 / 1000;
  r.audio.samples.assign(static_cast<std::size_t>(pad), 0.0);
  for (int wi : word_indices) {
    for (int p : words[static_cast<std::size_t>(wi)]) {
      const double ms = rng.uniform(spec.unit_ms_min, spec.unit_ms_max);
      const long n = static_cast<long>(ms * spec.sample_rate / 1000.0);
      UnitSpan span;
      span.phoneme = p;
      span.start = static_cast<long>(r.audio.samples.size());
      span.length = n;
      r.spans.push_back(span);
      const auto unit = render_unit(spec, p, emotion_idx, speaker_idx, n, rng);
      r.audio.samples.insert(r.audio.samples.end(), unit.begin(), unit.end());
    }
  }
  r.audio.samples.insert(r.audio.samples.end(), static_cast<std::size_t>(pad), 0.0);
  if (spec.noise_level > 0.0)
    for (auto& s : r.audio.samples) s += spec.noise_level * rng.normal();
  return r;
}

struct GeneratedCorpus {
  std::string manifest_path;
  std::string lexicon_path;
  std::string broad_class_path;
  std::vector<Utterance> utterances;
};

/// Pseudo broad classes: three frequency bands over the phoneme index range.
inline std::string pseudo_broad_class(int p, int n_phonemes) {
  static const char* kBands[] = {"low", "mid", "high"};
  const int n_classes = std::min(3, n_phonemes);
  return kBands[p * n_classes / n_phonemes];
}

/// Writes the full toy corpus: wav files, JSONL manifest, lexicon and a
/// broad-class map for the pseudo-phoneme inventory. Byte-deterministic
/// given the seed.
inline GeneratedCorpus generate(const SynthSpec& spec, const std::string& out_dir) {
  spec.validate();
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "wav");
  const auto words = make_pseudo_words(spec);

  GeneratedCorpus corpus;
  for (int s = 0; s < spec.n_speakers; ++s) {
    for (int i = 0; i < spec.utterances_per_speaker; ++i) {
      Rng rng(mix_seed(spec.seed, 1000 + static_cast<std::uint64_t>(s) * 100000 +
                                      static_cast<std::uint64_t>(i)));
      // global cycling keeps the corpus balanced within one utterance per class
      const int emotion_idx =
          (s * spec.utterances_per_speaker + i) % spec.emotions.size();
      const int n_words_utt =
          static_cast<int>(rng.uniform_int(spec.utt_words_min, spec.utt_words_max));
      std::vector<int> word_indices;
      for (int w = 0; w < n_words_utt; ++w)
        word_indices.push_back(static_cast<int>(rng.uniform_int(0, spec.n_words - 1)));

      const auto rendered =
          render_utterance(spec, words, word_indices, emotion_idx, s, rng);

      char id[32];
      std::snprintf(id, sizeof(id), "spk%d_utt%03d", s, i);
      const std::string wav_rel = std::string("wav/") + id + ".wav";
      write_wav((fs::path(out_dir) / wav_rel).string(), rendered.audio);

      Utterance u;
      u.id = id;
      u.audio_path = wav_rel;  // manifest-relative
      u.sample_rate = spec.sample_rate;
      u.speaker = "spk" + std::to_string(s);
      std::vector<std::string> word_syms;
      for (int wi : word_indices) word_syms.push_back(pseudo_word_symbol(wi));
      u.transcript = join(word_syms, " ");
      u.emotion = spec.emotions.ids()[static_cast<std::size_t>(emotion_idx)];
      u.language = "x-synthetic";
      corpus.utterances.push_back(std::move(u));
    }
  }

  corpus.manifest_path = (fs::path(out_dir) / "manifest.jsonl").string();
  save_manifest(corpus.manifest_path, corpus.utterances);
  for (auto& u : corpus.utterances)  // callers get resolvable paths
    u.audio_path = (fs::path(out_dir) / u.audio_path).string();

  std::string lex;
  for (int w = 0; w < spec.n_words; ++w) {
    std::vector<std::string> phones;
    for (int p : words[static_cast<std::size_t>(w)]) phones.push_back(pseudo_phoneme_symbol(p));
    lex += pseudo_word_symbol(w) + "  " + join(phones, " ") + "\n";
  }
  corpus.lexicon_path = (fs::path(out_dir) / "lexicon.txt").string();
  write_text_file(corpus.lexicon_path, lex);

  std::string bc;
  for (int p = 0; p < spec.n_pseudo_phonemes; ++p)
    bc += pseudo_phoneme_symbol(p) + " " + pseudo_broad_class(p, spec.n_pseudo_phonemes) + "\n";
  corpus.broad_class_path = (fs::path(out_dir) / "broad_classes.txt").string();
  write_text_file(corpus.broad_class_path, bc);

  return corpus;
}

}  // namespace edsr

#endif  // EDSR_SYNTH_HPP
