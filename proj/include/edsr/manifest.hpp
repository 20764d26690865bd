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
#ifndef EDSR_MANIFEST_HPP
#define EDSR_MANIFEST_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "edsr/common.hpp"
#include "edsr/emotion.hpp"

namespace edsr {

/// One dataset row. Audio stays on disk until a pipeline stage needs it.
struct Utterance {
  std::string id;
  std::string audio_path;  // resolved against the manifest directory
  int sample_rate = 16000;
  std::string speaker;
  std::string transcript;
  EmotionId emotion;
  std::string language;
};

struct ManifestLoadResult {
  std::vector<Utterance> utterances;
  std::map<std::string, long> excluded_by_label;  // alias-table exclusions
};

/// Loads a JSONL manifest. Each line must be an object with keys
/// id, audio_path, sample_rate, speaker, transcript, emotion, language.
/// Emotion labels are canonicalized through the alias table; labels the
/// table maps to "exclude" drop the row (counted in the result).
inline ManifestLoadResult load_manifest(
    const std::string& path,
    const EmotionAliasTable& aliases = EmotionAliasTable::defaults(),
    const EmotionSet& emotions = EmotionSet()) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  ManifestLoadResult result;
  std::set<std::string> seen_ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    auto need = [&](const char* key) -> const nlohmann::json& {
      if (!row.contains(key))
        throw ParseError(path + ":" + std::to_string(lineno) +
                         ": missing key '" + key + "'");
      return row.at(key);
    };
    Utterance u;
    try {
      u.id = need("id").get<std::string>();
      u.audio_path = need("audio_path").get<std::string>();
      u.sample_rate = need("sample_rate").get<int>();
      u.speaker = need("speaker").get<std::string>();
      u.transcript = need("transcript").get<std::string>();
      u.emotion = need("emotion").get<std::string>();
      u.language = need("language").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }

    if (u.id.empty())
      throw ValidationError(path + ":" + std::to_string(lineno) + ": empty id");
    if (!seen_ids.insert(u.id).second)
      throw ValidationError("duplicate utterance id: " + u.id);
    if (u.sample_rate != 8000 && u.sample_rate != 16000)
      throw ValidationError("utterance " + u.id + ": sample_rate " +
                            std::to_string(u.sample_rate) +
                            " not in {8000, 16000}");

    std::optional<EmotionId> canon;
    try {
      canon = aliases.resolve(u.emotion);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + " (utterance " + u.id + ")");
    }
    if (!canon) {
      result.excluded_by_label[to_lower(u.emotion)]++;
      continue;
    }
    u.emotion = *canon;
    if (!emotions.contains(u.emotion))
      throw ValidationError("utterance " + u.id + ": emotion '" + u.emotion +
                            "' not in the configured emotion set");

    if (!u.audio_path.empty() && !std::filesystem::path(u.audio_path).is_absolute())
      u.audio_path = (base / u.audio_path).string();
    result.utterances.push_back(std::move(u));
  }
  return result;
}

/// Writes a manifest; audio paths are emitted as given.
inline void save_manifest(const std::string& path, const std::vector<Utterance>& utts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest: " + path);
  for (const auto& u : utts) {
    nlohmann::ordered_json row;
    row["id"] = u.id;
    row["audio_path"] = u.audio_path;
    row["sample_rate"] = u.sample_rate;
    row["speaker"] = u.speaker;
    row["transcript"] = u.transcript;
    row["emotion"] = u.emotion;
    row["language"] = u.language;
    out << row.dump() << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace edsr

#endif  // EDSR_MANIFEST_HPP
