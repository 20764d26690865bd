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
#ifndef EDSR_PHONETICS_HPP
#define EDSR_PHONETICS_HPP

#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "edsr/common.hpp"
#include "edsr/lexicon.hpp"

namespace edsr {

/// Raised when a word has no syllable nucleus.
struct NoVowelError : ValidationError {
  using ValidationError::ValidationError;
};

/// Total map from stress-stripped phonemes to a small class inventory.
class BroadClassMap {
 public:
  /// Seven classes over the 39-phoneme ARPAbet inventory. The class order
  /// is part of the contract: it fixes the base-unit order of the
  /// broad-class taxonomy.
  static BroadClassMap builtin_arpabet() {
    BroadClassMap m;
    m.class_order_ = {"vowel", "stop", "affricate", "fricative",
                      "nasal", "liquid", "glide"};
    auto put = [&m](const char* cls, std::initializer_list<const char*> phones) {
      for (const char* p : phones) m.map_[p] = cls;
    };
    put("vowel", {"AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH",
                  "IY", "OW", "OY", "UH", "UW"});
    put("stop", {"B", "D", "G", "K", "P", "T"});
    put("affricate", {"CH", "JH"});
    put("fricative", {"DH", "F", "HH", "S", "SH", "TH", "V", "Z", "ZH"});
    put("nasal", {"M", "N", "NG"});
    put("liquid", {"L", "R"});
    put("glide", {"W", "Y"});
    return m;
  }

  /// File format: one "PHONEME CLASS" pair per line, '#' comments. Class
  /// order is the order of first appearance.
  static BroadClassMap load(const std::string& path) {
    BroadClassMap m;
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
                         ": expected 'PHONEME CLASS'");
      const std::string phone = to_upper(toks[0]);
      const std::string cls = toks[1];
      if (m.map_.count(phone))
        throw ValidationError(path + ":" + std::to_string(lineno) +
                              ": phoneme mapped twice: " + phone);
      m.map_[phone] = cls;
      if (std::find(m.class_order_.begin(), m.class_order_.end(), cls) ==
          m.class_order_.end())
        m.class_order_.push_back(cls);
    }
    if (m.map_.empty()) throw ValidationError(path + ": empty broad-class map");
    return m;
  }

  const std::string& class_of(const std::string& stripped_phone) const {
    auto it = map_.find(stripped_phone);
    if (it == map_.end())
      throw ValidationError("phoneme has no broad class: " + stripped_phone);
    return it->second;
  }

  /// Elementwise image; input must already be stress-stripped.
  std::vector<std::string> apply(const std::vector<std::string>& phones) const {
    std::vector<std::string> out;
    out.reserve(phones.size());
    for (const auto& p : phones) out.push_back(class_of(p));
    return out;
  }

  /// Checks totality over an inventory and that every class is hit.
  void validate_over(const std::vector<std::string>& inventory) const {
    std::set<std::string> hit;
    for (const auto& p : inventory) hit.insert(class_of(p));
    for (const auto& c : class_order_)
      if (!hit.count(c))
        throw ValidationError("broad class '" + c +
                              "' is not the image of any inventory phoneme");
  }

  const std::vector<std::string>& classes() const { return class_order_; }
  const std::map<std::string, std::string>& mapping() const { return map_; }

 private:
  std::map<std::string, std::string> map_;
  std::vector<std::string> class_order_;
};

/// Legal syllable onsets. The empty onset is always legal.
class OnsetInventory {
 public:
  static OnsetInventory builtin_english() {
    OnsetInventory inv;
    // single consonants (NG never starts an English syllable)
    for (const auto& p : arpabet_phonemes())
      if (!arpabet_vowels().count(p) && p != "NG") inv.insert({p});
    static const char* kClusters[] = {
        "P R",   "B R",   "T R",   "D R",  "K R",  "G R",  "F R",  "TH R",
        "SH R",  "P L",   "B L",   "K L",  "G L",  "F L",  "S L",  "T W",
        "D W",   "K W",   "G W",   "TH W", "S W",  "S P",  "S T",  "S K",
        "S M",   "S N",   "S F",   "S P R", "S P L", "S T R", "S K R",
        "S K W", "P Y",   "B Y",   "K Y",  "G Y",  "F Y",  "V Y",  "M Y",
        "HH Y",  "S P Y", "S K Y"};
    for (const char* c : kClusters) inv.insert(split_ws(c));
    return inv;
  }

  /// File format: one onset cluster per line, space-separated phonemes.
  static OnsetInventory load(const std::string& path) {
    OnsetInventory inv;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
      const std::string s = trim(line);
      if (s.empty() || s[0] == '#') continue;
      inv.insert(split_ws(s));
    }
    return inv;
  }

  void insert(std::vector<std::string> cluster) {
    max_len_ = std::max(max_len_, cluster.size());
    clusters_.insert(std::move(cluster));
  }

  bool legal(const std::vector<std::string>& cluster) const {
    if (cluster.empty()) return true;
    return clusters_.count(cluster) > 0;
  }

  std::size_t max_len() const { return max_len_; }
  std::size_t size() const { return clusters_.size(); }

 private:
  std::set<std::vector<std::string>> clusters_;
  std::size_t max_len_ = 0;
};

/// Maximal-onset syllabification of a stressed phoneme sequence. Intervocalic
/// consonants go to the longest cluster that is a legal onset of the next
/// syllable; the rest stay in the previous coda. Word-final consonants join
/// the last syllable. Throws NoVowelError when there is no nucleus.
inline std::vector<std::vector<std::string>> syllabify(
    const std::vector<std::string>& phones,
    const OnsetInventory& onsets = OnsetInventory::builtin_english(),
    const std::set<std::string>& vowels = arpabet_vowels()) {
  std::vector<std::size_t> nuclei;
  for (std::size_t i = 0; i < phones.size(); ++i)
    if (is_vowel_symbol(phones[i], vowels)) nuclei.push_back(i);
  if (nuclei.empty())
    throw NoVowelError("no syllable nucleus in: " + join(phones, " "));

  std::vector<std::vector<std::string>> syllables;
  std::size_t start = 0;
  for (std::size_t v = 0; v + 1 < nuclei.size(); ++v) {
    const std::size_t cur = nuclei[v];
    const std::size_t next = nuclei[v + 1];
    // consonant cluster strictly between the two nuclei
    std::vector<std::string> cluster(phones.begin() + cur + 1, phones.begin() + next);
    const std::vector<std::string> stripped = strip_stress(cluster);
    std::size_t onset_len = 0;
    for (std::size_t o = stripped.size(); o > 0; --o) {
      std::vector<std::string> suffix(stripped.end() - o, stripped.end());
      if (onsets.legal(suffix)) {
        onset_len = o;
        break;
      }
    }
    const std::size_t boundary = next - onset_len;
    syllables.emplace_back(phones.begin() + start, phones.begin() + boundary);
    start = boundary;
  }
  syllables.emplace_back(phones.begin() + start, phones.end());
  return syllables;
}

enum class TaxonomyKind { Phoneme, BroadClass, Syllable, Utterance };

inline std::string to_string(TaxonomyKind k) {
  switch (k) {
    case TaxonomyKind::Phoneme: return "phoneme";
    case TaxonomyKind::BroadClass: return "broad_class";
    case TaxonomyKind::Syllable: return "syllable";
    case TaxonomyKind::Utterance: return "utterance";
  }
  throw ValidationError("bad taxonomy kind");
}

inline TaxonomyKind taxonomy_kind_from_string(const std::string& s) {
  if (s == "phoneme") return TaxonomyKind::Phoneme;
  if (s == "broad_class") return TaxonomyKind::BroadClass;
  if (s == "syllable") return TaxonomyKind::Syllable;
  if (s == "utterance") return TaxonomyKind::Utterance;
  throw ValidationError("unknown taxonomy: '" + s +
                        "' (expect phoneme|broad_class|syllable|utterance)");
}

/// The single base unit of the utterance taxonomy.
inline const std::string kUtteranceUnit = "[UTT]";

/// Maps transcripts to base (emotion-free) unit sequences.
struct Taxonomy {
  TaxonomyKind kind = TaxonomyKind::Phoneme;
  std::vector<std::string> base_units;  // fixed inventory order
  BroadClassMap broad;                  // BroadClass only
  OnsetInventory onsets;                // Syllable only
  std::set<std::string> vowels = arpabet_vowels();
};

/// Uppercases, splits on whitespace and strips leading/trailing punctuation.
inline std::vector<std::string> tokenize_transcript(const std::string& transcript) {
  std::vector<std::string> words;
  for (auto& tok : split_ws(to_upper(transcript))) {
    auto keep = [](char c) {
      return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '\'';
    };
    std::size_t b = 0, e = tok.size();
    while (b < e && !keep(tok[b])) ++b;
    while (e > b && !keep(tok[e - 1])) --e;
    if (e > b) words.push_back(tok.substr(b, e - b));
  }
  return words;
}

inline Taxonomy make_phoneme_taxonomy(std::vector<std::string> inventory = arpabet_phonemes()) {
  if (inventory.empty()) throw ValidationError("empty phoneme inventory");
  Taxonomy t;
  t.kind = TaxonomyKind::Phoneme;
  t.base_units = std::move(inventory);
  return t;
}

inline Taxonomy make_broad_class_taxonomy(BroadClassMap map = BroadClassMap::builtin_arpabet()) {
  Taxonomy t;
  t.kind = TaxonomyKind::BroadClass;
  t.base_units = map.classes();
  t.broad = std::move(map);
  return t;
}

inline Taxonomy make_utterance_taxonomy() {
  Taxonomy t;
  t.kind = TaxonomyKind::Utterance;
  t.base_units = {kUtteranceUnit};
  return t;
}

/// Syllable symbol: stress-stripped phonemes joined by '_' ("P_IY").
inline std::string syllable_symbol(const std::vector<std::string>& syllable) {
  return join(strip_stress(syllable), "_");
}

namespace detail {

inline std::vector<std::string> word_to_syllable_symbols(
    const Taxonomy& t, const std::vector<std::string>& pron) {
  std::vector<std::vector<std::string>> sylls;
  try {
    sylls = syllabify(pron, t.onsets, t.vowels);
  } catch (const NoVowelError&) {
    sylls = {pron};  // vowel-less words ("mm") are one syllable
  }
  std::vector<std::string> out;
  out.reserve(sylls.size());
  for (const auto& s : sylls) out.push_back(syllable_symbol(s));
  return out;
}

}  // namespace detail

/// Maps one transcript to its base unit sequence under the taxonomy.
/// OOV words raise OovError; policy is the caller's business.
inline std::vector<std::string> transcript_to_base_units(const Taxonomy& t,
                                                         const Lexicon& lex,
                                                         const std::string& transcript) {
  if (t.kind == TaxonomyKind::Utterance) return {kUtteranceUnit};

  std::vector<std::string> units;
  for (const auto& word : tokenize_transcript(transcript)) {
    const auto& pron = lex.lookup(word);
    switch (t.kind) {
      case TaxonomyKind::Phoneme: {
        for (auto& p : strip_stress(pron)) units.push_back(std::move(p));
        break;
      }
      case TaxonomyKind::BroadClass: {
        for (auto& c : t.broad.apply(strip_stress(pron))) units.push_back(std::move(c));
        break;
      }
      case TaxonomyKind::Syllable: {
        for (auto& s : detail::word_to_syllable_symbols(t, pron)) units.push_back(std::move(s));
        break;
      }
      case TaxonomyKind::Utterance:
        break;  // handled above
    }
  }
  return units;
}

/// Builds the syllable taxonomy; its base inventory is induced from the
/// training transcripts (sorted for a stable unit order).
inline Taxonomy make_syllable_taxonomy(const Lexicon& lex,
                                       const std::vector<std::string>& train_transcripts,
                                       OnsetInventory onsets = OnsetInventory::builtin_english(),
                                       std::set<std::string> vowels = arpabet_vowels()) {
  Taxonomy t;
  t.kind = TaxonomyKind::Syllable;
  t.onsets = std::move(onsets);
  t.vowels = std::move(vowels);
  std::set<std::string> inventory;
  for (const auto& transcript : train_transcripts) {
    for (const auto& word : tokenize_transcript(transcript)) {
      if (!lex.contains(word)) continue;  // OOV handling happens at target build
      for (const auto& sym : detail::word_to_syllable_symbols(t, lex.lookup(word)))
        inventory.insert(sym);
    }
  }
  if (inventory.empty())
    throw ValidationError("no syllables induced from the training transcripts");
  t.base_units.assign(inventory.begin(), inventory.end());
  return t;
}

}  // namespace edsr

#endif  // EDSR_PHONETICS_HPP
