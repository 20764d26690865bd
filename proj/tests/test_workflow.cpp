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

#include <filesystem>
#include <numbers>

#include "edsr/synth.hpp"
#include "edsr/workflow.hpp"
#include "test_support.hpp"

using namespace edsr;

namespace {

namespace fs = std::filesystem;

/// Tiny corpus with English fixture transcripts over synthetic tone audio;
/// enough to drive the pipeline machinery (not meant to be learnable).
std::string make_english_corpus(const edsr_test::TempDir& tmp,
                                const std::vector<std::pair<std::string, std::string>>&
                                    transcript_and_emotion) {
  fs::create_directories(tmp.file("wav"));
  std::string rows;
  Rng rng(5);
  for (std::size_t i = 0; i < transcript_and_emotion.size(); ++i) {
    const std::string id = "u" + std::to_string(i);
    Waveform w;
    w.sample_rate = 16000;
    w.samples.resize(static_cast<std::size_t>(9600 + 1600 * (i % 3)));
    const double freq = 300.0 + 150.0 * static_cast<double>(i % 5);
    for (std::size_t s = 0; s < w.samples.size(); ++s)
      w.samples[s] = 0.3 * std::sin(2.0 * std::numbers::pi * freq *
                                    static_cast<double>(s) / 16000.0) +
                     0.02 * rng.normal();
    write_wav(tmp.file("wav/" + id + ".wav"), w);
    nlohmann::ordered_json j;
    j["id"] = id;
    j["audio_path"] = "wav/" + id + ".wav";
    j["sample_rate"] = 16000;
    j["speaker"] = "spk" + std::to_string(i % 2);
    j["transcript"] = transcript_and_emotion[i].first;
    j["emotion"] = transcript_and_emotion[i].second;
    j["language"] = "en-US";
    rows += j.dump() + "\n";
  }
  const std::string path = tmp.file("manifest.jsonl");
  write_text_file(path, rows);
  return path;
}

PipelineConfig tiny_train_config() {
  PipelineConfig cfg;
  cfg.train.total_updates = 4;
  cfg.train.head_only_updates = 4;
  cfg.train.max_tokens = 200000;
  cfg.encoder.hidden_dim = 8;
  cfg.encoder.n_heads = 2;
  cfg.encoder.n_blocks = 1;
  cfg.encoder.ffn_dim = 12;
  cfg.seed = 3;
  cfg.jobs = 1;
  return cfg;
}

}  // namespace

TEST_CASE("syllable crossval induces per-fold vocabularies and counts exclusions",
          "[workflow][slow]") {
  edsr_test::TempDir tmp;
  // speaker spk1 utters a word spk0 never says ("world"), so fold 0
  // (test = spk0) trains without it and fold 1 must exclude it from scoring
  const std::string manifest = make_english_corpus(
      tmp, {{"happy cat", "hap"},      // spk0
            {"world hello", "sad"},    // spk1
            {"happy hello", "neu"},    // spk0
            {"hello cat", "ang"},      // spk1
            {"cat happy", "hap"},      // spk0
            {"hello happy", "sad"}});  // spk1

  PipelineConfig cfg = tiny_train_config();
  cfg.manifest_path = manifest;
  cfg.lexicon_path = edsr_test::fixture_path("mini_lexicon.txt");
  cfg.taxonomy = TaxonomyKind::Syllable;
  const auto report = run_crossval(cfg, tmp.file("run"));

  REQUIRE(report.confusion.total() == 6);
  REQUIRE(report.folds.size() == 2);
  // "world" appears only in spk1's transcripts: when spk1 is the test side,
  // its syllables are missing from the fold vocabulary
  REQUIRE(report.excluded_from_scoring == 1);
  REQUIRE(fs::exists(tmp.file("run/report.json")));
  REQUIRE(fs::exists(tmp.file("run/folds.json")));
  REQUIRE(fs::exists(tmp.file("run/fold0/loss_curve.csv")));
}

TEST_CASE("cross-corpus classify works with a foreign manifest", "[workflow][slow]") {
  edsr_test::TempDir tmp;
  SynthSpec train_spec;
  train_spec.n_speakers = 2;
  train_spec.utterances_per_speaker = 6;
  train_spec.seed = 31;
  const auto train_corpus = generate(train_spec, tmp.file("train_corpus"));

  PipelineConfig cfg = tiny_train_config();
  cfg.manifest_path = train_corpus.manifest_path;
  cfg.lexicon_path = train_corpus.lexicon_path;
  cfg.taxonomy = TaxonomyKind::Phoneme;
  const std::string ck = run_train_full(cfg, tmp.file("model_run"));

  // a "foreign" corpus: different speakers and seed, same pseudo language
  SynthSpec foreign_spec = train_spec;
  foreign_spec.seed = 99;
  foreign_spec.n_speakers = 3;
  const auto foreign = generate(foreign_spec, tmp.file("foreign_corpus"));

  const auto report = run_classify(ck, foreign.manifest_path, tmp.file("votes.jsonl"),
                                   tmp.file("rep"), false);
  REQUIRE(report.confusion.total() == 18);
  REQUIRE(fs::exists(tmp.file("rep/report.json")));
  const auto j = nlohmann::json::parse(
      edsr_test::read_bytes(tmp.file("rep/report.json")));
  REQUIRE(j.at("total_utterances") == 18);
  REQUIRE(j.at("taxonomy") == "phoneme");
}

TEST_CASE("8 kHz audio is rejected without the resample flag and accepted with it",
          "[workflow]") {
  edsr_test::TempDir tmp;
  Waveform w8;
  w8.sample_rate = 8000;
  w8.samples.resize(6000);
  for (std::size_t i = 0; i < w8.samples.size(); ++i)
    w8.samples[i] = 0.4 * std::sin(2.0 * std::numbers::pi * 700.0 *
                                   static_cast<double>(i) / 8000.0);
  write_wav(tmp.file("low.wav"), w8);

  Utterance u;
  u.id = "low";
  u.audio_path = tmp.file("low.wav");
  u.sample_rate = 8000;
  REQUIRE_THROWS_WITH(load_utterance_audio(u, false),
                      Catch::Matchers::ContainsSubstring("resample"));
  const Waveform w16 = load_utterance_audio(u, true);
  REQUIRE(w16.sample_rate == 16000);
  REQUIRE(w16.samples.size() == 12000);
}

TEST_CASE("train run writes a self-contained checkpoint", "[workflow][slow]") {
  edsr_test::TempDir tmp;
  SynthSpec spec;
  spec.n_speakers = 2;
  spec.utterances_per_speaker = 4;
  spec.seed = 17;
  const auto corpus = generate(spec, tmp.file("corpus"));

  PipelineConfig cfg = tiny_train_config();
  cfg.manifest_path = corpus.manifest_path;
  cfg.lexicon_path = corpus.lexicon_path;
  cfg.taxonomy = TaxonomyKind::BroadClass;
  cfg.broad_class_path = corpus.broad_class_path;
  const std::string ck_path = run_train_full(cfg, tmp.file("run"));

  const LoadedModel m = load_model(ck_path);
  REQUIRE(m.taxonomy == "broad_class");
  REQUIRE(m.vocab.size() == 13);  // 3 pseudo classes x 4 emotions + blank
  REQUIRE(m.emotions.ids() == canonical_emotions());
  REQUIRE(fs::exists(tmp.file("run/vocabulary.txt")));
  REQUIRE(fs::exists(tmp.file("run/targets.tsv")));
  REQUIRE(fs::exists(tmp.file("run/loss_curve.csv")));
}
