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
#ifndef EDSR_EVALUATE_HPP
#define EDSR_EVALUATE_HPP

#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "edsr/common.hpp"
#include "edsr/ctc.hpp"
#include "edsr/emotion.hpp"
#include "edsr/vocabulary.hpp"

namespace edsr {

// ---------------------------------------------------------------------------
// majority vote

struct VoteResult {
  std::string utterance_id;
  EmotionId predicted;
  std::map<EmotionId, long> counts;
  bool fallback_used = false;
};

/// Maps a decoded emotion-dependent token sequence to one emotion. The
/// emotion with the highest token count wins; ties are broken by the larger
/// summed best-path log-probability mass over the tied emotions' frames,
/// then by emotion-set order. An empty decode falls back to the emotion
/// whose best tagged token, summed over all frames, carries the most mass.
inline VoteResult majority_vote(const std::vector<int>& decoded, const Matrix& logpost,
                                const UnitVocabulary& vocab, const EmotionSet& emotions) {
  VoteResult r;
  for (const auto& e : emotions.ids()) r.counts[e] = 0;

  // emotion index per token id (blank and foreign tags map to -1)
  std::vector<int> emo_of(static_cast<std::size_t>(vocab.size()), -1);
  for (int k = 1; k < vocab.size(); ++k)
    emo_of[static_cast<std::size_t>(k)] = emotions.index(vocab.emotion_of(k));

  if (decoded.empty()) {
    r.fallback_used = true;
    std::vector<double> mass(emotions.ids().size(), 0.0);
    for (Eigen::Index t = 0; t < logpost.rows(); ++t) {
      std::vector<double> frame_best(emotions.ids().size(), kLogZero);
      for (int k = 1; k < vocab.size(); ++k) {
        const int e = emo_of[static_cast<std::size_t>(k)];
        if (e >= 0) frame_best[static_cast<std::size_t>(e)] =
            std::max(frame_best[static_cast<std::size_t>(e)], logpost(t, k));
      }
      for (std::size_t e = 0; e < mass.size(); ++e) mass[e] += frame_best[e];
    }
    std::size_t best = 0;
    for (std::size_t e = 1; e < mass.size(); ++e)
      if (mass[e] > mass[best]) best = e;
    r.predicted = emotions.ids()[best];
    return r;
  }

  for (int id : decoded) r.counts[vocab.emotion_of(id)]++;
  long best_count = -1;
  for (const auto& e : emotions.ids()) best_count = std::max(best_count, r.counts[e]);
  std::vector<EmotionId> tied;
  for (const auto& e : emotions.ids())
    if (r.counts[e] == best_count) tied.push_back(e);
  if (tied.size() == 1) {
    r.predicted = tied[0];
    return r;
  }

  // best-path log-mass per tied emotion; emotion-set order breaks what's left
  std::map<EmotionId, double> mass;
  for (const auto& e : tied) mass[e] = 0.0;
  for (Eigen::Index t = 0; t < logpost.rows(); ++t) {
    int best = 0;
    for (Eigen::Index k = 1; k < logpost.cols(); ++k)
      if (logpost(t, k) > logpost(t, best)) best = static_cast<int>(k);
    if (best == kBlankId) continue;
    const EmotionId e = vocab.emotion_of(best);
    auto it = mass.find(e);
    if (it != mass.end()) it->second += logpost(t, best);
  }
  r.predicted = tied[0];
  for (const auto& e : tied)
    if (mass[e] > mass[r.predicted]) r.predicted = e;
  return r;
}

// ---------------------------------------------------------------------------
// confusion / accuracy

struct ConfusionMatrix {
  std::vector<EmotionId> emotions;      // axis order
  std::vector<std::vector<long>> counts;  // rows = target, cols = predicted

  explicit ConfusionMatrix(const EmotionSet& es = EmotionSet())
      : emotions(es.ids()),
        counts(emotions.size(), std::vector<long>(emotions.size(), 0)) {}

  int index(const EmotionId& e) const {
    for (std::size_t i = 0; i < emotions.size(); ++i)
      if (emotions[i] == e) return static_cast<int>(i);
    throw ValidationError("emotion not on confusion axes: " + e);
  }

  void add(const EmotionId& target, const EmotionId& predicted, long n = 1) {
    counts[static_cast<std::size_t>(index(target))]
          [static_cast<std::size_t>(index(predicted))] += n;
  }

  long row_sum(std::size_t i) const {
    long s = 0;
    for (long c : counts[i]) s += c;
    return s;
  }
  long trace() const {
    long s = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) s += counts[i][i];
    return s;
  }
  long total() const {
    long s = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) s += row_sum(i);
    return s;
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other) {
    if (emotions != other.emotions)
      throw ValidationError("cannot merge confusion matrices with different axes");
    for (std::size_t i = 0; i < counts.size(); ++i)
      for (std::size_t j = 0; j < counts.size(); ++j) counts[i][j] += other.counts[i][j];
    return *this;
  }
};

/// (WA, UA) as fractions. WA = trace/total; UA = mean per-class recall.
/// A class with no test utterances has undefined recall, so a zero row is
/// an error.
inline std::pair<double, double> compute_wa_ua(const ConfusionMatrix& cm) {
  const long total = cm.total();
  if (total == 0) throw ValidationError("empty confusion matrix");
  double recall_sum = 0.0;
  for (std::size_t i = 0; i < cm.counts.size(); ++i) {
    const long rs = cm.row_sum(i);
    if (rs == 0)
      throw ValidationError("no utterances for emotion '" + cm.emotions[i] +
                            "': recall undefined");
    recall_sum += static_cast<double>(cm.counts[i][i]) / static_cast<double>(rs);
  }
  const double wa = static_cast<double>(cm.trace()) / static_cast<double>(total);
  const double ua = recall_sum / static_cast<double>(cm.counts.size());
  return {wa, ua};
}

/// Fraction -> percent rounded half-up to 0.1 pp (the reporting convention).
inline double round_pct(double fraction) {
  return std::floor(fraction * 1000.0 + 0.5) / 10.0;
}

// ---------------------------------------------------------------------------
// alignment scoring

struct AlignmentCounts {
  long S = 0, D = 0, I = 0, N = 0;

  double error_rate() const {
    if (N == 0) throw ValidationError("error rate undefined: empty reference");
    return static_cast<double>(S + D + I) / static_cast<double>(N);
  }
  AlignmentCounts& operator+=(const AlignmentCounts& o) {
    S += o.S;
    D += o.D;
    I += o.I;
    N += o.N;
    return *this;
  }
};

/// Uniform costs (1/1/1) are the default; the sctk weights (sub 4,
/// del/ins 3) pick the path the NIST tool would, counts are reported the
/// same way either side.
enum class AlignWeights { Uniform, Sctk };

/// Minimum-edit-distance alignment counts against N = |ref|. Among
/// minimum-cost alignments the one with the fewest deletions+insertions
/// (i.e. preferring a substitution over a del+ins pair) is chosen; that
/// secondary criterion pins down a unique (S, D, I) triple.
inline AlignmentCounts align(const std::vector<std::string>& ref,
                             const std::vector<std::string>& hyp,
                             AlignWeights weights = AlignWeights::Uniform) {
  const long ws = (weights == AlignWeights::Uniform) ? 1 : 4;
  const long wd = (weights == AlignWeights::Uniform) ? 1 : 3;
  const long wi = (weights == AlignWeights::Uniform) ? 1 : 3;
  const std::size_t R = ref.size(), H = hyp.size();

  struct Cell {
    long cost;
    long di;  // deletions + insertions along the chosen path
    bool operator<(const Cell& o) const {
      return cost != o.cost ? cost < o.cost : di < o.di;
    }
  };
  std::vector<std::vector<Cell>> dp(R + 1, std::vector<Cell>(H + 1));
  dp[0][0] = {0, 0};
  for (std::size_t i = 1; i <= R; ++i) dp[i][0] = {static_cast<long>(i) * wd, static_cast<long>(i)};
  for (std::size_t j = 1; j <= H; ++j) dp[0][j] = {static_cast<long>(j) * wi, static_cast<long>(j)};
  for (std::size_t i = 1; i <= R; ++i) {
    for (std::size_t j = 1; j <= H; ++j) {
      const bool match = ref[i - 1] == hyp[j - 1];
      Cell best{dp[i - 1][j - 1].cost + (match ? 0 : ws), dp[i - 1][j - 1].di};
      const Cell del{dp[i - 1][j].cost + wd, dp[i - 1][j].di + 1};
      const Cell ins{dp[i][j - 1].cost + wi, dp[i][j - 1].di + 1};
      if (del < best) best = del;
      if (ins < best) best = ins;
      dp[i][j] = best;
    }
  }

  // D - I is fixed by the lengths, so (cost, di) determines the counts.
  const Cell end = dp[R][H];
  AlignmentCounts c;
  c.N = static_cast<long>(R);
  const long len_gap = static_cast<long>(R) - static_cast<long>(H);
  c.I = (end.di - len_gap) / 2;
  c.D = end.di - c.I;
  c.S = (end.cost - c.D * wd - c.I * wi) / ws;
  return c;
}

/// Removes the "@EMO" tag from every token.
inline std::vector<std::string> strip_emotion_tags(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(UnitVocabulary::split(t).first);
  return out;
}

/// Aggregated S/D/I/N over paired reference and hypothesis transcripts.
/// Every id must appear on both sides.
inline AlignmentCounts score_units(
    const std::map<std::string, std::vector<std::string>>& refs,
    const std::map<std::string, std::vector<std::string>>& hyps, bool strip_emotion,
    AlignWeights weights = AlignWeights::Uniform) {
  for (const auto& [id, hyp] : hyps)
    if (!refs.count(id)) throw ValidationError("hypothesis id has no reference: " + id);
  AlignmentCounts total;
  for (const auto& [id, ref] : refs) {
    auto it = hyps.find(id);
    if (it == hyps.end()) throw ValidationError("reference id has no hypothesis: " + id);
    if (strip_emotion)
      total += align(strip_emotion_tags(ref), strip_emotion_tags(it->second), weights);
    else
      total += align(ref, it->second, weights);
  }
  return total;
}

// ---------------------------------------------------------------------------
// transcript files ("utt_id<TAB>tok1 tok2 ...")

inline void save_token_file(const std::string& path,
                            const std::map<std::string, std::vector<std::string>>& seqs) {
  std::string out;
  for (const auto& [id, toks] : seqs) out += id + "\t" + join(toks, " ") + "\n";
  write_text_file(path, out);
}

inline std::map<std::string, std::vector<std::string>> load_token_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::map<std::string, std::vector<std::string>> seqs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) + ": missing tab separator");
    const std::string id = line.substr(0, tab);
    if (seqs.count(id))
      throw ValidationError(path + ":" + std::to_string(lineno) + ": duplicate id " + id);
    seqs[id] = split_ws(line.substr(tab + 1));
  }
  return seqs;
}

// ---------------------------------------------------------------------------
// fold evaluation and reports

struct FoldReport {
  int fold_id = 0;
  long test_size = 0;
  ConfusionMatrix confusion;
  AlignmentCounts tagged;    // unit errors counting emotion
  AlignmentCounts stripped;  // unit errors with tags removed
  std::vector<VoteResult> votes;
  long scored_utterances = 0;    // had a reference target
  long excluded_from_scoring = 0;
};

struct EvaluationReport {
  std::string taxonomy;
  EmotionSet emotions;
  ConfusionMatrix confusion{EmotionSet()};
  AlignmentCounts tagged, stripped;
  std::vector<FoldReport> folds;
  long excluded_from_scoring = 0;
  long fallback_votes = 0;
  std::uint64_t seed = 0;
};

inline EvaluationReport merge_folds(const std::string& taxonomy, const EmotionSet& emotions,
                                    std::vector<FoldReport> folds, std::uint64_t seed) {
  EvaluationReport rep;
  rep.taxonomy = taxonomy;
  rep.emotions = emotions;
  rep.confusion = ConfusionMatrix(emotions);
  rep.seed = seed;
  for (auto& f : folds) {
    rep.confusion += f.confusion;
    rep.tagged += f.tagged;
    rep.stripped += f.stripped;
    rep.excluded_from_scoring += f.excluded_from_scoring;
    for (const auto& v : f.votes)
      if (v.fallback_used) rep.fallback_votes++;
  }
  rep.folds = std::move(folds);
  return rep;
}

namespace detail {

inline nlohmann::ordered_json counts_to_json(const AlignmentCounts& c) {
  nlohmann::ordered_json j;
  j["S"] = c.S;
  j["D"] = c.D;
  j["I"] = c.I;
  j["N"] = c.N;
  if (c.N > 0) {
    j["error_rate_pct"] = round_pct(c.error_rate());
    j["sub_pct"] = round_pct(static_cast<double>(c.S) / c.N);
    j["del_pct"] = round_pct(static_cast<double>(c.D) / c.N);
    j["ins_pct"] = round_pct(static_cast<double>(c.I) / c.N);
  }
  return j;
}

}  // namespace detail

/// report.json payload. Deliberately path- and timestamp-free so a rerun
/// with the same seed reproduces identical bytes.
inline nlohmann::ordered_json report_to_json(const EvaluationReport& rep) {
  nlohmann::ordered_json j;
  j["taxonomy"] = rep.taxonomy;
  j["emotions"] = rep.emotions.ids();
  j["seed"] = rep.seed;
  const auto [wa, ua] = compute_wa_ua(rep.confusion);
  j["wa_pct"] = round_pct(wa);
  j["ua_pct"] = round_pct(ua);
  j["total_utterances"] = rep.confusion.total();
  j["confusion"] = rep.confusion.counts;
  if (rep.tagged.N > 0) {
    j["unit_errors"]["with_emotion"] = detail::counts_to_json(rep.tagged);
    j["unit_errors"]["without_emotion"] = detail::counts_to_json(rep.stripped);
  }
  j["excluded_from_scoring"] = rep.excluded_from_scoring;
  j["fallback_votes"] = rep.fallback_votes;
  nlohmann::ordered_json folds = nlohmann::ordered_json::array();
  for (const auto& f : rep.folds) {
    nlohmann::ordered_json fj;
    fj["fold_id"] = f.fold_id;
    fj["test_size"] = f.test_size;
    // a single fold may miss a class entirely; WA stays defined, UA does not
    fj["wa_pct"] = round_pct(static_cast<double>(f.confusion.trace()) /
                             static_cast<double>(f.confusion.total()));
    bool ua_defined = true;
    for (std::size_t i = 0; i < f.confusion.counts.size(); ++i)
      if (f.confusion.row_sum(i) == 0) ua_defined = false;
    if (ua_defined)
      fj["ua_pct"] = round_pct(compute_wa_ua(f.confusion).second);
    else
      fj["ua_pct"] = nullptr;
    fj["confusion"] = f.confusion.counts;
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);
  return j;
}

/// Human-readable summary in the shape of the usual accuracy/confusion
/// tables.
inline std::string report_to_text(const EvaluationReport& rep) {
  std::ostringstream out;
  const auto [wa, ua] = compute_wa_ua(rep.confusion);
  out << "Emotion recognition (" << rep.taxonomy << " units, "
      << rep.confusion.total() << " utterances)\n";
  out << std::fixed << std::setprecision(1);
  out << "  WA " << round_pct(wa) << "%   UA " << round_pct(ua) << "%\n\n";

  out << "Confusion matrix (rows = target, cols = predicted)\n";
  out << std::setw(8) << "";
  for (const auto& e : rep.confusion.emotions) out << std::setw(8) << e;
  out << "\n";
  for (std::size_t i = 0; i < rep.confusion.counts.size(); ++i) {
    out << std::setw(8) << rep.confusion.emotions[i];
    for (long c : rep.confusion.counts[i]) out << std::setw(8) << c;
    out << "\n";
  }

  if (rep.tagged.N > 0) {
    auto line = [&](const char* label, const AlignmentCounts& c) {
      out << "  " << label << ": " << round_pct(c.error_rate()) << "%  (sub "
          << round_pct(static_cast<double>(c.S) / c.N) << "%, del "
          << round_pct(static_cast<double>(c.D) / c.N) << "%, ins "
          << round_pct(static_cast<double>(c.I) / c.N) << "%)  N=" << c.N << "\n";
    };
    out << "\nUnit error rates\n";
    line("with emotion   ", rep.tagged);
    line("without emotion", rep.stripped);
  }
  if (!rep.folds.empty()) {
    out << "\nPer-fold WA\n";
    for (const auto& f : rep.folds) {
      const double fwa = static_cast<double>(f.confusion.trace()) /
                         static_cast<double>(f.confusion.total());
      out << "  fold " << f.fold_id << ": WA " << round_pct(fwa) << "%  ("
          << f.test_size << " utterances)\n";
    }
  }
  if (rep.excluded_from_scoring > 0)
    out << "\n" << rep.excluded_from_scoring
        << " utterance(s) excluded from unit-error scoring (no usable reference)\n";
  return out.str();
}

}  // namespace edsr

#endif  // EDSR_EVALUATE_HPP
