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
#ifndef EDSR_FOLDS_HPP
#define EDSR_FOLDS_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "edsr/common.hpp"
#include "edsr/manifest.hpp"

namespace edsr {

struct Fold {
  int fold_id = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

/// Speaker-grouped cross-validation splits. Test sets are pairwise disjoint,
/// exhaust the manifest, and never share a speaker with their train set.
struct FoldSpec {
  std::vector<Fold> folds;
  std::string grouping_key = "speaker";
};

enum class FoldMode { LeaveOneSpeakerOut, KFoldBySpeaker };

namespace detail {

inline std::map<std::string, std::vector<std::string>> by_speaker(
    const std::vector<Utterance>& utts) {
  std::map<std::string, std::vector<std::string>> groups;  // sorted by speaker
  for (const auto& u : utts) groups[u.speaker].push_back(u.id);
  return groups;
}

}  // namespace detail

inline FoldSpec make_folds(const std::vector<Utterance>& utts, FoldMode mode,
                           int k = 0) {
  const auto groups = detail::by_speaker(utts);
  FoldSpec spec;

  if (mode == FoldMode::LeaveOneSpeakerOut) {
    if (groups.size() < 2)
      throw ValidationError(
          "leave-one-speaker-out needs at least 2 speakers, got " +
          std::to_string(groups.size()));
    int fid = 0;
    for (const auto& [speaker, ids] : groups) {
      Fold f;
      f.fold_id = fid++;
      f.test_ids = ids;
      for (const auto& u : utts)
        if (u.speaker != speaker) f.train_ids.push_back(u.id);
      spec.folds.push_back(std::move(f));
    }
    return spec;
  }

  // k-fold by speaker: speakers are whole units, assigned greedily
  // (largest first) to the currently smallest fold.
  if (k < 2) throw ValidationError("k-fold needs k >= 2");
  if (static_cast<std::size_t>(k) > groups.size())
    throw ValidationError("k=" + std::to_string(k) + " exceeds the " +
                          std::to_string(groups.size()) + " speaker groups");
  std::vector<std::pair<std::string, std::size_t>> sized;
  for (const auto& [speaker, ids] : groups) sized.push_back({speaker, ids.size()});
  std::stable_sort(sized.begin(), sized.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  std::vector<std::vector<std::string>> fold_speakers(k);
  std::vector<std::size_t> fold_sizes(k, 0);
  for (const auto& [speaker, n] : sized) {
    const std::size_t target = static_cast<std::size_t>(
        std::min_element(fold_sizes.begin(), fold_sizes.end()) - fold_sizes.begin());
    fold_speakers[target].push_back(speaker);
    fold_sizes[target] += n;
  }
  for (int i = 0; i < k; ++i) {
    Fold f;
    f.fold_id = i;
    const auto& test_spk = fold_speakers[i];
    auto in_test = [&](const std::string& s) {
      return std::find(test_spk.begin(), test_spk.end(), s) != test_spk.end();
    };
    for (const auto& u : utts)
      (in_test(u.speaker) ? f.test_ids : f.train_ids).push_back(u.id);
    spec.folds.push_back(std::move(f));
  }
  return spec;
}

inline void save_folds(const std::string& path, const FoldSpec& spec) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& f : spec.folds) {
    nlohmann::ordered_json j;
    j["fold_id"] = f.fold_id;
    j["train"] = f.train_ids;
    j["test"] = f.test_ids;
    arr.push_back(std::move(j));
  }
  write_text_file(path, arr.dump(2) + "\n");
}

inline FoldSpec load_folds(const std::string& path) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!arr.is_array()) throw ParseError(path + ": expected a JSON array of folds");
  FoldSpec spec;
  for (const auto& j : arr) {
    Fold f;
    f.fold_id = j.at("fold_id").get<int>();
    f.train_ids = j.at("train").get<std::vector<std::string>>();
    f.test_ids = j.at("test").get<std::vector<std::string>>();
    spec.folds.push_back(std::move(f));
  }
  return spec;
}

}  // namespace edsr

#endif  // EDSR_FOLDS_HPP
