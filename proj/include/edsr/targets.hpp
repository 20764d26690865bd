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
#ifndef EDSR_TARGETS_HPP
#define EDSR_TARGETS_HPP

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "edsr/common.hpp"
#include "edsr/manifest.hpp"
#include "edsr/phonetics.hpp"
#include "edsr/vocabulary.hpp"

namespace edsr {

/// Per-utterance CTC target: non-blank token ids, all tagged with the
/// utterance's single emotion.
struct TargetSequence {
  std::string utterance_id;
  std::vector<int> token_ids;
};

struct Exclusion {
  std::string id;
  std::string reason;
};

enum class OovPolicy { ExcludeUtterance, SkipWord };

struct TargetBuildResult {
  std::vector<TargetSequence> targets;
  std::vector<Exclusion> exclusions;
};

/// Builds emotion-tagged targets for every utterance. Utterances that hit
/// the OOV policy "exclude", map to a token missing from the vocabulary
/// (unseen syllables of an evaluation corpus), or produce no units at all
/// are dropped and reported.
inline TargetBuildResult build_targets(const Taxonomy& taxonomy, const Lexicon& lexicon,
                                       const UnitVocabulary& vocab,
                                       const std::vector<Utterance>& utts,
                                       OovPolicy policy = OovPolicy::ExcludeUtterance) {
  TargetBuildResult result;
  for (const auto& u : utts) {
    std::vector<std::string> units;
    bool excluded = false;
    if (taxonomy.kind == TaxonomyKind::Utterance) {
      units = {kUtteranceUnit};
    } else if (policy == OovPolicy::ExcludeUtterance) {
      try {
        units = transcript_to_base_units(taxonomy, lexicon, u.transcript);
      } catch (const OovError& e) {
        result.exclusions.push_back({u.id, "oov word: " + e.word});
        excluded = true;
      }
    } else {  // SkipWord: drop unknown words, keep the rest
      for (const auto& word : tokenize_transcript(u.transcript)) {
        try {
          for (auto& unit : transcript_to_base_units(taxonomy, lexicon, word))
            units.push_back(std::move(unit));
        } catch (const OovError&) {
        }
      }
    }
    if (excluded) continue;
    if (units.empty()) {
      result.exclusions.push_back({u.id, "no units from transcript"});
      continue;
    }

    TargetSequence seq;
    seq.utterance_id = u.id;
    seq.token_ids.reserve(units.size());
    bool ok = true;
    for (const auto& unit : units) {
      const int id = vocab.id_of(UnitVocabulary::compose(unit, u.emotion));
      if (id < 0) {
        result.exclusions.push_back({u.id, "token not in vocabulary: " +
                                               UnitVocabulary::compose(unit, u.emotion)});
        ok = false;
        break;
      }
      seq.token_ids.push_back(id);
    }
    if (ok) result.targets.push_back(std::move(seq));
  }
  return result;
}

/// Targets file: one line per utterance, "utt_id<TAB>tok1 tok2 ..." with
/// token strings (the same shape the decoupled scorer consumes).
inline void save_targets(const std::string& path, const std::vector<TargetSequence>& targets,
                         const UnitVocabulary& vocab) {
  std::string out;
  for (const auto& t : targets) {
    out += t.utterance_id;
    out += '\t';
    std::vector<std::string> toks;
    toks.reserve(t.token_ids.size());
    for (int id : t.token_ids) toks.push_back(vocab.token(id));
    out += join(toks, " ");
    out += '\n';
  }
  write_text_file(path, out);
}

inline std::vector<TargetSequence> load_targets(const std::string& path,
                                                const UnitVocabulary& vocab) {
  std::istringstream in(read_text_file(path));
  std::vector<TargetSequence> targets;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) + ": missing tab separator");
    TargetSequence t;
    t.utterance_id = line.substr(0, tab);
    for (const auto& tok : split_ws(line.substr(tab + 1))) {
      const int id = vocab.id_of(tok);
      if (id < 0)
        throw ValidationError(path + ":" + std::to_string(lineno) +
                              ": token not in vocabulary: " + tok);
      t.token_ids.push_back(id);
    }
    targets.push_back(std::move(t));
  }
  return targets;
}

/// Exclusion report: JSONL {id, reason}.
inline void save_exclusions(const std::string& path, const std::vector<Exclusion>& ex) {
  std::string out;
  for (const auto& e : ex) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["reason"] = e.reason;
    out += j.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace edsr

#endif  // EDSR_TARGETS_HPP
