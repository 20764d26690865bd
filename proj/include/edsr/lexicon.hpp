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
#ifndef EDSR_LEXICON_HPP
#define EDSR_LEXICON_HPP

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "edsr/common.hpp"

namespace edsr {

/// The 39-symbol stress-stripped ARPAbet inventory.
inline const std::vector<std::string>& arpabet_phonemes() {
  static const std::vector<std::string> k = {
      "AA", "AE", "AH", "AO", "AW", "AY", "B",  "CH", "D",  "DH",
      "EH", "ER", "EY", "F",  "G",  "HH", "IH", "IY", "JH", "K",
      "L",  "M",  "N",  "NG", "OW", "OY", "P",  "R",  "S",  "SH",
      "T",  "TH", "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH"};
  return k;
}

inline const std::set<std::string>& arpabet_vowels() {
  static const std::set<std::string> k = {"AA", "AE", "AH", "AO", "AW",
                                          "AY", "EH", "ER", "EY", "IH",
                                          "IY", "OW", "OY", "UH", "UW"};
  return k;
}

/// Removes trailing stress digits ("IY0" -> "IY"). Length is preserved.
inline std::vector<std::string> strip_stress(const std::vector<std::string>& phones) {
  std::vector<std::string> out;
  out.reserve(phones.size());
  for (const auto& p : phones) {
    std::size_t end = p.size();
    while (end > 0 && std::isdigit(static_cast<unsigned char>(p[end - 1]))) --end;
    out.push_back(p.substr(0, end));
  }
  return out;
}

inline std::string strip_stress_one(const std::string& p) {
  std::size_t end = p.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(p[end - 1]))) --end;
  return p.substr(0, end);
}

/// A symbol is a vowel if it carries a stress digit or its stripped form is
/// in the vowel inventory.
inline bool is_vowel_symbol(const std::string& p,
                            const std::set<std::string>& vowels = arpabet_vowels()) {
  if (!p.empty() && std::isdigit(static_cast<unsigned char>(p.back()))) return true;
  return vowels.count(strip_stress_one(p)) > 0;
}

/// Pronunciation dictionary. File format: one entry per line,
/// "WORD  PH1 PH2 ...", variants as "WORD(2)  ...". Lines starting with
/// ';' or '#' are comments. Lookup is case-insensitive and returns the
/// first-listed pronunciation.
class Lexicon {
 public:
  static Lexicon parse_string(const std::string& text, const std::string& origin = "<string>",
                              const std::set<std::string>* inventory = nullptr) {
    Lexicon lex;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string s = trim(line);
      if (s.empty() || s[0] == ';' || s[0] == '#') continue;
      auto toks = split_ws(s);
      if (toks.size() < 2)
        throw ParseError(origin + ":" + std::to_string(lineno) +
                         ": entry needs a word and at least one phoneme");
      std::string word = to_upper(toks[0]);
      const auto paren = word.find('(');
      if (paren != std::string::npos && word.back() == ')')
        word = word.substr(0, paren);  // variant marker
      std::vector<std::string> phones(toks.begin() + 1, toks.end());
      if (inventory) {
        for (const auto& p : phones) {
          if (!inventory->count(strip_stress_one(p)))
            throw ValidationError(origin + ":" + std::to_string(lineno) +
                                  ": phoneme '" + p + "' in entry '" + word +
                                  "' is not in the declared inventory");
        }
      }
      lex.entries_[word].push_back(std::move(phones));
    }
    return lex;
  }

  static Lexicon parse_file(const std::string& path,
                            const std::set<std::string>* inventory = nullptr) {
    return parse_string(read_text_file(path), path, inventory);
  }

  bool contains(const std::string& word) const {
    return entries_.count(to_upper(word)) > 0;
  }

  /// First-listed pronunciation, stress digits preserved.
  const std::vector<std::string>& lookup(const std::string& word) const {
    if (word.empty()) throw ValidationError("cannot look up empty word");
    auto it = entries_.find(to_upper(word));
    if (it == entries_.end()) throw OovError(word);
    return it->second.front();
  }

  const std::vector<std::vector<std::string>>& pronunciations(const std::string& word) const {
    auto it = entries_.find(to_upper(word));
    if (it == entries_.end()) throw OovError(word);
    return it->second;
  }

  std::size_t size() const { return entries_.size(); }

  /// Sorted, unique, stress-stripped symbol inventory over all entries.
  std::vector<std::string> phoneme_inventory() const {
    std::set<std::string> syms;
    for (const auto& [word, prons] : entries_)
      for (const auto& pron : prons)
        for (const auto& p : pron) syms.insert(strip_stress_one(p));
    return {syms.begin(), syms.end()};
  }

  const std::map<std::string, std::vector<std::vector<std::string>>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::vector<std::vector<std::string>>> entries_;
};

}  // namespace edsr

#endif  // EDSR_LEXICON_HPP
