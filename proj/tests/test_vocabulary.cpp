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

#include "edsr/vocabulary.hpp"
#include "test_support.hpp"

using namespace edsr;

TEST_CASE("vocabulary size laws", "[vocabulary]") {
  const EmotionSet es;
  REQUIRE(UnitVocabulary::build(make_phoneme_taxonomy(), es).size() == 157);   // 39*4+1
  REQUIRE(UnitVocabulary::build(make_utterance_taxonomy(), es).size() == 5);   // 1*4+1
  REQUIRE(UnitVocabulary::build(make_broad_class_taxonomy(), es).size() == 29);  // 7*4+1
}

TEST_CASE("token order is base-unit major with blank first", "[vocabulary]") {
  const auto v = UnitVocabulary::build(make_utterance_taxonomy(), EmotionSet());
  REQUIRE(v.tokens() == std::vector<std::string>{"<blank>", "[UTT]@neu", "[UTT]@hap",
                                                 "[UTT]@ang", "[UTT]@sad"});
}

TEST_CASE("size minus one is divisible by the emotion count", "[vocabulary]") {
  const EmotionSet es;
  for (const auto& tax :
       {make_phoneme_taxonomy(), make_broad_class_taxonomy(), make_utterance_taxonomy()}) {
    const auto v = UnitVocabulary::build(tax, es);
    REQUIRE((v.size() - 1) % es.size() == 0);
    REQUIRE((v.size() - 1) / es.size() == static_cast<int>(tax.base_units.size()));
  }
}

TEST_CASE("token split inverts compose", "[vocabulary]") {
  const auto [unit, emo] = UnitVocabulary::split(UnitVocabulary::compose("P_IY", "hap"));
  REQUIRE(unit == "P_IY");
  REQUIRE(emo == "hap");
}

TEST_CASE("units containing the tag separator are rejected", "[vocabulary]") {
  Taxonomy bad = make_phoneme_taxonomy({"A@B"});
  REQUIRE_THROWS_WITH(UnitVocabulary::build(bad, EmotionSet()),
                      Catch::Matchers::ContainsSubstring("@"));
}

TEST_CASE("vocabulary file round-trips", "[vocabulary]") {
  edsr_test::TempDir tmp;
  const auto v = UnitVocabulary::build(make_broad_class_taxonomy(), EmotionSet());
  v.save(tmp.file("vocab.txt"));
  const auto loaded = UnitVocabulary::load(tmp.file("vocab.txt"));
  REQUIRE(loaded == v);
  REQUIRE(loaded.id_of("vowel@hap") == v.id_of("vowel@hap"));
}

TEST_CASE("vocabulary load validates blank, duplicates and emptiness", "[vocabulary]") {
  edsr_test::TempDir tmp;
  write_text_file(tmp.file("noblank.txt"), "A@neu\nB@neu\n");
  REQUIRE_THROWS_AS(UnitVocabulary::load(tmp.file("noblank.txt")), ValidationError);

  write_text_file(tmp.file("dup.txt"), "<blank>\nA@neu\nA@neu\n");
  REQUIRE_THROWS_AS(UnitVocabulary::load(tmp.file("dup.txt")), ValidationError);

  write_text_file(tmp.file("empty.txt"), "");
  REQUIRE_THROWS_AS(UnitVocabulary::load(tmp.file("empty.txt")), ValidationError);
}

TEST_CASE("emotion_of reads the tag of non-blank ids", "[vocabulary]") {
  const auto v = UnitVocabulary::build(make_utterance_taxonomy(), EmotionSet());
  REQUIRE(v.emotion_of(1) == "neu");
  REQUIRE(v.emotion_of(4) == "sad");
  REQUIRE_THROWS_AS(v.emotion_of(0), ValidationError);
}
