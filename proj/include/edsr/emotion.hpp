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
#ifndef EDSR_EMOTION_HPP
#define EDSR_EMOTION_HPP

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "edsr/common.hpp"

namespace edsr {

using EmotionId = std::string;

/// Canonical emotion inventory. The order is fixed: it defines confusion
/// matrix axes and the final tie-break in majority voting.
inline const std::vector<EmotionId>& canonical_emotions() {
  static const std::vector<EmotionId> k = {"neu", "hap", "ang", "sad"};
  return k;
}

/// An ordered, duplicate-free emotion inventory.
class EmotionSet {
 public:
  EmotionSet() : ids_(canonical_emotions()) {}

  explicit EmotionSet(std::vector<EmotionId> ids) : ids_(std::move(ids)) {
    if (ids_.empty()) throw ValidationError("emotion set must be nonempty");
    std::set<EmotionId> seen;
    for (const auto& e : ids_)
      if (!seen.insert(e).second)
        throw ValidationError("duplicate emotion in set: " + e);
  }

  const std::vector<EmotionId>& ids() const { return ids_; }
  int size() const { return static_cast<int>(ids_.size()); }

  /// Position in the fixed order, or -1.
  int index(const EmotionId& e) const {
    for (std::size_t i = 0; i < ids_.size(); ++i)
      if (ids_[i] == e) return static_cast<int>(i);
    return -1;
  }

  bool contains(const EmotionId& e) const { return index(e) >= 0; }

 private:
  std::vector<EmotionId> ids_;
};

/// Maps raw corpus labels to canonical emotion ids. A label may also be
/// mapped to the marker "exclude", which drops the utterance at load time
/// (with a count); labels absent from the table are hard errors.
class EmotionAliasTable {
 public:
  static constexpr const char* kExclude = "exclude";

  /// The default table: canonical ids, common full names, and the
  /// "excited" -> hap merge.
  static EmotionAliasTable defaults() {
    EmotionAliasTable t;
    t.aliases_ = {
        {"neu", "neu"},     {"hap", "hap"},   {"ang", "ang"},  {"sad", "sad"},
        {"neutral", "neu"}, {"happy", "hap"}, {"angry", "ang"}, {"anger", "ang"},
        {"sadness", "sad"}, {"excited", "hap"},
    };
    return t;
  }

  /// Key-value text config: one "label target" pair per line, '#' comments.
  /// Target is a canonical emotion id or "exclude" / "-".
  static EmotionAliasTable load(const std::string& path) {
    EmotionAliasTable t;
    std::istringstream in(read_text_file(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string s = trim(line);
      if (s.empty() || s[0] == '#') continue;
      const auto toks = split_ws(s);
      if (toks.size() != 2)
        throw ParseError(path + ":" + std::to_string(lineno) +
                         ": expected 'label target'");
      std::string target = to_lower(toks[1]);
      if (target == "-") target = kExclude;
      t.aliases_[to_lower(toks[0])] = target;
    }
    return t;
  }

  /// Canonicalizes a raw label. Returns nullopt when the label is configured
  /// for exclusion; throws on labels the table knows nothing about.
  std::optional<EmotionId> resolve(const std::string& raw_label) const {
    const std::string key = to_lower(trim(raw_label));
    auto it = aliases_.find(key);
    if (it == aliases_.end())
      throw ValidationError("unknown emotion label: '" + raw_label + "'");
    if (it->second == kExclude) return std::nullopt;
    return it->second;
  }

  void add(const std::string& label, const std::string& target) {
    aliases_[to_lower(label)] = to_lower(target);
  }

  const std::map<std::string, std::string>& entries() const { return aliases_; }

 private:
  std::map<std::string, std::string> aliases_;
};

}  // namespace edsr

#endif  // EDSR_EMOTION_HPP
