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

#include "edsr/targets.hpp"
#include "test_support.hpp"

using namespace edsr;

namespace {

Utterance utt(const std::string& id, const std::string& transcript,
              const std::string& emotion) {
  Utterance u;
  u.id = id;
  u.transcript = transcript;
  u.emotion = emotion;
  u.speaker = "spk0";
  return u;
}

struct Setup {
  Lexicon lex = Lexicon::parse_file(edsr_test::fixture_path("mini_lexicon.txt"));
  EmotionSet emotions;
  Taxonomy phoneme = make_phoneme_taxonomy();
  UnitVocabulary vocab = UnitVocabulary::build(phoneme, emotions);
};

}  // namespace

TEST_CASE("happy under hap maps to the tagged phoneme tokens", "[targets]") {
  Setup s;
  const auto res = build_targets(s.phoneme, s.lex, s.vocab, {utt("u1", "happy", "hap")});
  REQUIRE(res.targets.size() == 1);
  std::vector<std::string> toks;
  for (int id : res.targets[0].token_ids) toks.push_back(s.vocab.token(id));
  REQUIRE(toks == std::vector<std::string>{"HH@hap", "AE@hap", "P@hap", "IY@hap"});
}

TEST_CASE("utterance taxonomy yields one token per utterance", "[targets]") {
  Setup s;
  const auto tax = make_utterance_taxonomy();
  const auto vocab = UnitVocabulary::build(tax, s.emotions);
  const auto res = build_targets(tax, s.lex, vocab,
                                 {utt("u1", "whatever words", "ang"), utt("u2", "", "sad")});
  REQUIRE(res.targets.size() == 2);
  REQUIRE(res.targets[0].token_ids == std::vector<int>{vocab.id_of("[UTT]@ang")});
  REQUIRE(res.targets[1].token_ids == std::vector<int>{vocab.id_of("[UTT]@sad")});
}

TEST_CASE("oov under the exclude policy drops the utterance into the report", "[targets]") {
  Setup s;
  const auto res = build_targets(s.phoneme, s.lex, s.vocab,
                                 {utt("good", "happy", "neu"), utt("bad", "qqqzz", "neu")});
  REQUIRE(res.targets.size() == 1);
  REQUIRE(res.targets[0].utterance_id == "good");
  REQUIRE(res.exclusions.size() == 1);
  REQUIRE(res.exclusions[0].id == "bad");
  REQUIRE_THAT(res.exclusions[0].reason, Catch::Matchers::ContainsSubstring("QQQZZ"));
}

TEST_CASE("skip-word policy keeps the known words", "[targets]") {
  Setup s;
  const auto res = build_targets(s.phoneme, s.lex, s.vocab,
                                 {utt("u1", "happy qqqzz cat", "neu")}, OovPolicy::SkipWord);
  REQUIRE(res.targets.size() == 1);
  REQUIRE(res.targets[0].token_ids.size() == 7);  // HH AE P IY + K AE T
}

TEST_CASE("empty transcripts are reported, not silently dropped", "[targets]") {
  Setup s;
  const auto res = build_targets(s.phoneme, s.lex, s.vocab, {utt("u1", "", "neu")});
  REQUIRE(res.targets.empty());
  REQUIRE(res.exclusions.size() == 1);
}

TEST_CASE("every target is emotion-pure", "[targets]") {
  Setup s;
  Rng rng(7);
  const std::vector<std::string> words = {"happy", "hello", "world", "cat", "sad", "the"};
  std::vector<Utterance> utts;
  for (int i = 0; i < 40; ++i) {
    std::string transcript;
    for (int w = 0; w < 3; ++w)
      transcript += words[static_cast<std::size_t>(rng.uniform_int(0, 5))] + " ";
    utts.push_back(utt("u" + std::to_string(i), transcript,
                       s.emotions.ids()[static_cast<std::size_t>(rng.uniform_int(0, 3))]));
  }
  const auto res = build_targets(s.phoneme, s.lex, s.vocab, utts);
  std::map<std::string, std::string> emotion_of;
  for (const auto& u : utts) emotion_of[u.id] = u.emotion;
  for (const auto& t : res.targets) {
    REQUIRE_FALSE(t.token_ids.empty());
    for (int id : t.token_ids) {
      REQUIRE(id >= 1);
      REQUIRE(id < s.vocab.size());
      REQUIRE(s.vocab.emotion_of(id) == emotion_of.at(t.utterance_id));
    }
  }
}

TEST_CASE("target building is deterministic", "[targets]") {
  Setup s;
  const std::vector<Utterance> utts = {utt("a", "happy world", "hap"),
                                       utt("b", "the cat", "sad")};
  edsr_test::TempDir tmp;
  const auto r1 = build_targets(s.phoneme, s.lex, s.vocab, utts);
  const auto r2 = build_targets(s.phoneme, s.lex, s.vocab, utts);
  save_targets(tmp.file("t1.tsv"), r1.targets, s.vocab);
  save_targets(tmp.file("t2.tsv"), r2.targets, s.vocab);
  REQUIRE(edsr_test::read_bytes(tmp.file("t1.tsv")) ==
          edsr_test::read_bytes(tmp.file("t2.tsv")));
}

TEST_CASE("targets file round-trips through the vocabulary", "[targets]") {
  Setup s;
  edsr_test::TempDir tmp;
  const auto res = build_targets(s.phoneme, s.lex, s.vocab,
                                 {utt("a", "happy world", "hap"), utt("b", "cat", "ang")});
  save_targets(tmp.file("targets.tsv"), res.targets, s.vocab);
  const auto loaded = load_targets(tmp.file("targets.tsv"), s.vocab);
  REQUIRE(loaded.size() == res.targets.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    REQUIRE(loaded[i].utterance_id == res.targets[i].utterance_id);
    REQUIRE(loaded[i].token_ids == res.targets[i].token_ids);
  }
}

TEST_CASE("unseen syllables at evaluation time land in the exclusion report", "[targets]") {
  const auto lex = Lexicon::parse_file(edsr_test::fixture_path("mini_lexicon.txt"));
  const EmotionSet emotions;
  // inventory induced from a training split that never saw "world"
  const auto tax = make_syllable_taxonomy(lex, {"happy hello"});
  const auto vocab = UnitVocabulary::build(tax, emotions);
  const auto res = build_targets(tax, lex, vocab, {utt("w", "world", "neu")});
  REQUIRE(res.targets.empty());
  REQUIRE(res.exclusions.size() == 1);
  REQUIRE_THAT(res.exclusions[0].reason,
               Catch::Matchers::ContainsSubstring("not in vocabulary"));
}
