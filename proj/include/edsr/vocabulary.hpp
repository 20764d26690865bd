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
#ifndef EDSR_VOCABULARY_HPP
#define EDSR_VOCABULARY_HPP

#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "edsr/common.hpp"
#include "edsr/emotion.hpp"
#include "edsr/phonetics.hpp"

namespace edsr {

inline const std::string kBlankSymbol = "<blank>";

/// Emotion-dependent CTC token inventory. Index 0 is the blank; every other
/// token is "UNIT@EMO". Token order is base-unit major: for each base unit
/// in inventory order, one token per emotion in emotion-set order.
class UnitVocabulary {
 public:
  UnitVocabulary() = default;

  static std::string compose(const std::string& unit, const EmotionId& emo) {
    return unit + "@" + emo;
  }

  /// Splits "UNIT@EMO" at the last '@'. Blank has no emotion part.
  static std::pair<std::string, std::string> split(const std::string& token) {
    const auto at = token.rfind('@');
    if (at == std::string::npos) return {token, ""};
    return {token.substr(0, at), token.substr(at + 1)};
  }

  static UnitVocabulary build(const Taxonomy& taxonomy, const EmotionSet& emotions) {
    if (taxonomy.base_units.empty())
      throw ValidationError("cannot build a vocabulary from an empty base inventory");
    std::vector<std::string> tokens;
    tokens.reserve(taxonomy.base_units.size() * emotions.size() + 1);
    tokens.push_back(kBlankSymbol);
    for (const auto& unit : taxonomy.base_units) {
      if (unit.find('@') != std::string::npos)
        throw ValidationError("'@' is reserved for emotion tags; bad unit: " + unit);
      for (const auto& emo : emotions.ids()) tokens.push_back(compose(unit, emo));
    }
    return from_tokens(std::move(tokens));
  }

  static UnitVocabulary from_tokens(std::vector<std::string> tokens) {
    UnitVocabulary v;
    v.tokens_ = std::move(tokens);
    if (v.tokens_.empty()) throw ValidationError("empty vocabulary");
    if (v.tokens_[0] != kBlankSymbol)
      throw ValidationError("vocabulary must start with " + kBlankSymbol);
    for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
      if (!v.index_.emplace(v.tokens_[i], static_cast<int>(i)).second)
        throw ValidationError("duplicate token in vocabulary: " + v.tokens_[i]);
    }
    return v;
  }

  int size() const { return static_cast<int>(tokens_.size()); }
  int blank_id() const { return 0; }

  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  /// Token id or -1.
  int id_of(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? -1 : it->second;
  }

  /// Emotion tag of a non-blank token id.
  std::string emotion_of(int id) const {
    if (id <= 0 || id >= size())
      throw ValidationError("token id out of non-blank range: " + std::to_string(id));
    return split(tokens_[static_cast<std::size_t>(id)]).second;
  }

  void save(const std::string& path) const {
    std::string out;
    for (const auto& t : tokens_) out += t + "\n";
    write_text_file(path, out);
  }

  /// One token per line, first line must be the blank.
  static UnitVocabulary load(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (!t.empty()) tokens.push_back(t);
    }
    if (tokens.empty()) throw ValidationError(path + ": empty vocabulary file");
    if (tokens[0] != kBlankSymbol)
      throw ValidationError(path + ": first token must be " + kBlankSymbol);
    return from_tokens(std::move(tokens));
  }

  bool operator==(const UnitVocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace edsr

#endif  // EDSR_VOCABULARY_HPP
