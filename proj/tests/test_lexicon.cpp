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

#include "edsr/lexicon.hpp"
#include "test_support.hpp"

using namespace edsr;

TEST_CASE("fixture lexicon resolves happy", "[lexicon]") {
  const auto lex = Lexicon::parse_file(edsr_test::fixture_path("mini_lexicon.txt"));
  REQUIRE(lex.lookup("happy") == std::vector<std::string>{"HH", "AE1", "P", "IY0"});
  REQUIRE(lex.lookup("HAPPY") == lex.lookup("Happy"));  // case-insensitive
}

TEST_CASE("first-listed pronunciation wins for variant entries", "[lexicon]") {
  const auto lex = Lexicon::parse_file(edsr_test::fixture_path("mini_lexicon.txt"));
  REQUIRE(lex.lookup("the") == std::vector<std::string>{"DH", "AH0"});
  REQUIRE(lex.pronunciations("the").size() == 2);
}

TEST_CASE("absent word raises an oov error carrying the word", "[lexicon]") {
  const auto lex = Lexicon::parse_file(edsr_test::fixture_path("mini_lexicon.txt"));
  try {
    lex.lookup("zzzqx");
    FAIL("expected OovError");
  } catch (const OovError& e) {
    REQUIRE(e.word == "zzzqx");
  }
}

TEST_CASE("stress stripping removes trailing digits and keeps length", "[lexicon]") {
  REQUIRE(strip_stress({"HH", "AE1", "P", "IY0"}) ==
          std::vector<std::string>{"HH", "AE", "P", "IY"});
  REQUIRE(strip_stress({}).empty());
  REQUIRE(strip_stress({"K", "T", "S"}) == std::vector<std::string>{"K", "T", "S"});
}

TEST_CASE("inventory validation rejects foreign symbols", "[lexicon]") {
  const std::set<std::string> inv(arpabet_phonemes().begin(), arpabet_phonemes().end());
  REQUIRE_NOTHROW(Lexicon::parse_string("CAT  K AE1 T\n", "<t>", &inv));
  REQUIRE_THROWS_WITH(Lexicon::parse_string("XYZZY  Q1 X\n", "<t>", &inv),
                      Catch::Matchers::ContainsSubstring("Q1"));
}

TEST_CASE("entries need at least one phoneme", "[lexicon]") {
  REQUIRE_THROWS_AS(Lexicon::parse_string("LONELY\n"), ParseError);
}

TEST_CASE("induced inventory is sorted unique stripped symbols", "[lexicon]") {
  const auto lex = Lexicon::parse_string("AB  X A1\nBA  A0 Y\n");
  REQUIRE(lex.phoneme_inventory() == std::vector<std::string>{"A", "X", "Y"});
}

TEST_CASE("arpabet inventory has 39 symbols, 15 vowels", "[lexicon]") {
  REQUIRE(arpabet_phonemes().size() == 39);
  REQUIRE(arpabet_vowels().size() == 15);
  for (const auto& v : arpabet_vowels())
    REQUIRE(std::find(arpabet_phonemes().begin(), arpabet_phonemes().end(), v) !=
            arpabet_phonemes().end());
}
