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

#include <set>

#include "edsr/folds.hpp"
#include "test_support.hpp"

using namespace edsr;

namespace {

std::vector<Utterance> fake_manifest(int n_speakers, int per_speaker) {
  std::vector<Utterance> utts;
  for (int s = 0; s < n_speakers; ++s)
    for (int i = 0; i < per_speaker; ++i) {
      Utterance u;
      u.id = "s" + std::to_string(s) + "_u" + std::to_string(i);
      u.speaker = "spk" + std::to_string(s);
      u.emotion = "neu";
      utts.push_back(std::move(u));
    }
  return utts;
}

void check_invariants(const FoldSpec& spec, const std::vector<Utterance>& utts) {
  std::map<std::string, std::string> speaker_of;
  for (const auto& u : utts) speaker_of[u.id] = u.speaker;

  std::set<std::string> all_test_ids;
  for (const auto& f : spec.folds) {
    std::set<std::string> train_speakers, test_speakers;
    for (const auto& id : f.train_ids) train_speakers.insert(speaker_of.at(id));
    for (const auto& id : f.test_ids) {
      REQUIRE(all_test_ids.insert(id).second);  // pairwise disjoint
      test_speakers.insert(speaker_of.at(id));
    }
    for (const auto& s : test_speakers) REQUIRE(train_speakers.count(s) == 0);
    REQUIRE(f.train_ids.size() + f.test_ids.size() == utts.size());
  }
  REQUIRE(all_test_ids.size() == utts.size());  // exhaustive union
}

}  // namespace

TEST_CASE("leave-one-speaker-out over 10 speakers gives 10 single-speaker folds", "[folds]") {
  const auto utts = fake_manifest(10, 7);
  const auto spec = make_folds(utts, FoldMode::LeaveOneSpeakerOut);
  REQUIRE(spec.folds.size() == 10);
  for (const auto& f : spec.folds) {
    std::set<std::string> test_speakers;
    for (const auto& id : f.test_ids)
      test_speakers.insert(id.substr(0, id.find('_')));
    REQUIRE(test_speakers.size() == 1);
    REQUIRE(f.test_ids.size() == 7);
  }
  check_invariants(spec, utts);
}

TEST_CASE("two-speaker split is exhaustive and symmetric", "[folds]") {
  std::vector<Utterance> utts;
  for (int i = 0; i < 3; ++i)
    utts.push_back({.id = "a" + std::to_string(i), .speaker = "A", .emotion = "neu"});
  for (int i = 0; i < 2; ++i)
    utts.push_back({.id = "b" + std::to_string(i), .speaker = "B", .emotion = "neu"});
  const auto spec = make_folds(utts, FoldMode::LeaveOneSpeakerOut);
  REQUIRE(spec.folds.size() == 2);
  REQUIRE(spec.folds[0].test_ids == std::vector<std::string>{"a0", "a1", "a2"});
  REQUIRE(spec.folds[0].train_ids == std::vector<std::string>{"b0", "b1"});
  REQUIRE(spec.folds[1].test_ids == std::vector<std::string>{"b0", "b1"});
  REQUIRE(spec.folds[1].train_ids == std::vector<std::string>{"a0", "a1", "a2"});
}

TEST_CASE("random manifests keep the fold invariants", "[folds]") {
  Rng rng(404);
  for (int trial = 0; trial < 25; ++trial) {
    const int speakers = static_cast<int>(rng.uniform_int(2, 9));
    std::vector<Utterance> utts;
    for (int s = 0; s < speakers; ++s) {
      const int n = static_cast<int>(rng.uniform_int(1, 12));
      for (int i = 0; i < n; ++i)
        utts.push_back({.id = "s" + std::to_string(s) + "_" + std::to_string(i),
                        .speaker = "spk" + std::to_string(s),
                        .emotion = "neu"});
    }
    check_invariants(make_folds(utts, FoldMode::LeaveOneSpeakerOut), utts);
    const int k = static_cast<int>(rng.uniform_int(2, speakers));
    check_invariants(make_folds(utts, FoldMode::KFoldBySpeaker, k), utts);
  }
}

TEST_CASE("single speaker cannot be leave-one-speaker-out split", "[folds]") {
  const auto utts = fake_manifest(1, 5);
  REQUIRE_THROWS_AS(make_folds(utts, FoldMode::LeaveOneSpeakerOut), ValidationError);
}

TEST_CASE("k-fold validates k against the speaker count", "[folds]") {
  const auto utts = fake_manifest(3, 2);
  REQUIRE_THROWS_AS(make_folds(utts, FoldMode::KFoldBySpeaker, 4), ValidationError);
  REQUIRE_THROWS_AS(make_folds(utts, FoldMode::KFoldBySpeaker, 1), ValidationError);
  const auto spec = make_folds(utts, FoldMode::KFoldBySpeaker, 3);
  REQUIRE(spec.folds.size() == 3);
}

TEST_CASE("fold file round-trips", "[folds]") {
  edsr_test::TempDir tmp;
  const auto utts = fake_manifest(4, 3);
  const auto spec = make_folds(utts, FoldMode::LeaveOneSpeakerOut);
  save_folds(tmp.file("folds.json"), spec);
  const auto loaded = load_folds(tmp.file("folds.json"));
  REQUIRE(loaded.folds.size() == spec.folds.size());
  for (std::size_t i = 0; i < spec.folds.size(); ++i) {
    REQUIRE(loaded.folds[i].fold_id == spec.folds[i].fold_id);
    REQUIRE(loaded.folds[i].train_ids == spec.folds[i].train_ids);
    REQUIRE(loaded.folds[i].test_ids == spec.folds[i].test_ids);
  }
}
