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
#ifndef EDSR_WORKFLOW_HPP
#define EDSR_WORKFLOW_HPP

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "edsr/acoustic.hpp"
#include "edsr/audio.hpp"
#include "edsr/common.hpp"
#include "edsr/ctc.hpp"
#include "edsr/emotion.hpp"
#include "edsr/evaluate.hpp"
#include "edsr/folds.hpp"
#include "edsr/lexicon.hpp"
#include "edsr/manifest.hpp"
#include "edsr/phonetics.hpp"
#include "edsr/targets.hpp"
#include "edsr/trainer.hpp"
#include "edsr/vocabulary.hpp"

namespace edsr {

/// End-to-end run configuration shared by the CLI subcommands.
struct PipelineConfig {
  std::string manifest_path;
  std::string lexicon_path;      // unused by the utterance taxonomy
  std::string broad_class_path;  // empty = built-in ARPAbet classes
  std::string onset_path;        // empty = built-in English onsets
  std::string alias_path;        // empty = default alias table
  TaxonomyKind taxonomy = TaxonomyKind::Phoneme;
  OovPolicy oov_policy = OovPolicy::ExcludeUtterance;
  bool resample = false;  // upsample 8 kHz rows at load
  TrainConfig train = TrainConfig::desk_scale();
  EncoderConfig encoder{};  // vocab_size is filled per run
  std::uint64_t seed = 1;
  int kfold = 0;  // 0 = leave-one-speaker-out
  int jobs = 2;
  bool save_fold_checkpoints = false;
};

namespace workflow_detail {

inline EmotionAliasTable aliases_for(const PipelineConfig& cfg) {
  return cfg.alias_path.empty() ? EmotionAliasTable::defaults()
                                : EmotionAliasTable::load(cfg.alias_path);
}

/// Fixed 39-phoneme ARPAbet when the lexicon fits inside it, otherwise the
/// inventory induced from the lexicon (custom phone sets, pseudo corpora).
inline std::vector<std::string> resolve_phoneme_inventory(const Lexicon& lex) {
  const auto induced = lex.phoneme_inventory();
  const auto& arpabet = arpabet_phonemes();
  for (const auto& p : induced)
    if (std::find(arpabet.begin(), arpabet.end(), p) == arpabet.end()) return induced;
  return arpabet;
}

}  // namespace workflow_detail

/// Builds the taxonomy named by the config. Syllable inventories are induced
/// from the supplied (training) transcripts.
inline Taxonomy make_taxonomy(const PipelineConfig& cfg, const Lexicon& lex,
                              const std::vector<std::string>& train_transcripts) {
  switch (cfg.taxonomy) {
    case TaxonomyKind::Phoneme:
      return make_phoneme_taxonomy(workflow_detail::resolve_phoneme_inventory(lex));
    case TaxonomyKind::BroadClass: {
      auto map = cfg.broad_class_path.empty() ? BroadClassMap::builtin_arpabet()
                                              : BroadClassMap::load(cfg.broad_class_path);
      map.validate_over(workflow_detail::resolve_phoneme_inventory(lex));
      return make_broad_class_taxonomy(std::move(map));
    }
    case TaxonomyKind::Syllable: {
      auto onsets = cfg.onset_path.empty() ? OnsetInventory::builtin_english()
                                           : OnsetInventory::load(cfg.onset_path);
      return make_syllable_taxonomy(lex, train_transcripts, std::move(onsets));
    }
    case TaxonomyKind::Utterance:
      return make_utterance_taxonomy();
  }
  throw ValidationError("bad taxonomy kind");
}

/// Loads (and optionally resamples) the audio behind one utterance.
inline Waveform load_utterance_audio(const Utterance& u, bool resample) {
  Waveform w = read_wav(u.audio_path);
  if (w.sample_rate != 16000) {
    if (!resample)
      throw ValidationError("utterance " + u.id + " is sampled at " +
                            std::to_string(w.sample_rate) +
                            " Hz; rerun with resampling enabled (--resample)");
    w = resample_to_16k(w);
  }
  return w;
}

/// Decode + vote + score over one test set. Utterances without a usable
/// reference are still emotion-classified but excluded from unit scoring.
inline FoldReport evaluate_utterances(
    int fold_id, const ToyEncoder& model, const std::vector<const Utterance*>& test,
    const std::map<std::string, const Waveform*>& audio,
    const std::map<std::string, std::vector<int>>& refs, const UnitVocabulary& vocab,
    const EmotionSet& emotions) {
  FoldReport rep;
  rep.fold_id = fold_id;
  rep.confusion = ConfusionMatrix(emotions);
  rep.test_size = static_cast<long>(test.size());
  for (const Utterance* u : test) {
    const Matrix logpost = log_softmax(model.encode(*audio.at(u->id)));
    const std::vector<int> decoded = greedy_decode(logpost);
    VoteResult vote = majority_vote(decoded, logpost, vocab, emotions);
    vote.utterance_id = u->id;
    rep.confusion.add(u->emotion, vote.predicted);
    auto ref_it = refs.find(u->id);
    if (ref_it != refs.end()) {
      std::vector<std::string> ref_toks, hyp_toks;
      for (int id : ref_it->second) ref_toks.push_back(vocab.token(id));
      for (int id : decoded) hyp_toks.push_back(vocab.token(id));
      rep.tagged += align(ref_toks, hyp_toks);
      rep.stripped += align(strip_emotion_tags(ref_toks), strip_emotion_tags(hyp_toks));
      rep.scored_utterances++;
    } else {
      rep.excluded_from_scoring++;
    }
    rep.votes.push_back(std::move(vote));
  }
  return rep;
}

/// Speaker-based cross-validation over the whole pipeline. Writes
/// folds.json, per-fold artifacts, report.json and report.txt into out_dir,
/// and returns the merged report. Deterministic given cfg.seed.
inline EvaluationReport run_crossval(const PipelineConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const EmotionSet emotions;
  const auto loaded = load_manifest(cfg.manifest_path, workflow_detail::aliases_for(cfg), emotions);
  const auto& utts = loaded.utterances;
  if (utts.empty()) throw ValidationError("manifest has no usable utterances");

  Lexicon lex;
  if (cfg.taxonomy != TaxonomyKind::Utterance) lex = Lexicon::parse_file(cfg.lexicon_path);

  const FoldSpec folds = cfg.kfold > 0
                             ? make_folds(utts, FoldMode::KFoldBySpeaker, cfg.kfold)
                             : make_folds(utts, FoldMode::LeaveOneSpeakerOut);
  save_folds((fs::path(out_dir) / "folds.json").string(), folds);

  std::map<std::string, const Utterance*> by_id;
  for (const auto& u : utts) by_id[u.id] = &u;
  std::map<std::string, Waveform> audio_store;
  for (const auto& u : utts) audio_store[u.id] = load_utterance_audio(u, cfg.resample);
  std::map<std::string, const Waveform*> audio;
  for (auto& [id, w] : audio_store) audio[id] = &w;

  std::vector<FoldReport> reports(folds.folds.size());
  std::vector<std::string> fold_errors(folds.folds.size());

  auto run_fold = [&](std::size_t fi) {
    const Fold& fold = folds.folds[fi];
    const std::string fold_dir = (fs::path(out_dir) / ("fold" + std::to_string(fold.fold_id))).string();
    fs::create_directories(fold_dir);

    std::vector<Utterance> train_utts, test_utts;
    for (const auto& id : fold.train_ids) train_utts.push_back(*by_id.at(id));
    for (const auto& id : fold.test_ids) test_utts.push_back(*by_id.at(id));

    std::vector<std::string> train_transcripts;
    for (const auto& u : train_utts) train_transcripts.push_back(u.transcript);
    const Taxonomy taxonomy = make_taxonomy(cfg, lex, train_transcripts);
    const UnitVocabulary vocab = UnitVocabulary::build(taxonomy, emotions);

    const auto train_built = build_targets(taxonomy, lex, vocab, train_utts, cfg.oov_policy);
    if (!train_built.exclusions.empty())
      save_exclusions((fs::path(fold_dir) / "train_exclusions.jsonl").string(),
                      train_built.exclusions);
    std::vector<TrainItem> items;
    for (const auto& t : train_built.targets)
      items.push_back({t.utterance_id, *audio.at(t.utterance_id), t.token_ids});

    EncoderConfig enc_cfg = cfg.encoder;
    enc_cfg.vocab_size = vocab.size();
    ToyEncoder model(enc_cfg, mix_seed(cfg.seed, 100 + static_cast<std::uint64_t>(fold.fold_id)));
    TrainConfig train_cfg = cfg.train;
    train_cfg.seed = mix_seed(cfg.seed, 200 + static_cast<std::uint64_t>(fold.fold_id));
    const TrainState state =
        train(train_cfg, model, items, cfg.save_fold_checkpoints ? fold_dir : "");
    export_loss_curve(state, (fs::path(fold_dir) / "loss_curve.csv").string());

    const auto test_built = build_targets(taxonomy, lex, vocab, test_utts, cfg.oov_policy);
    if (!test_built.exclusions.empty())
      save_exclusions((fs::path(fold_dir) / "test_exclusions.jsonl").string(),
                      test_built.exclusions);
    std::map<std::string, std::vector<int>> refs;
    for (const auto& t : test_built.targets) refs[t.utterance_id] = t.token_ids;

    std::vector<const Utterance*> test_ptrs;
    for (const auto& id : fold.test_ids) test_ptrs.push_back(by_id.at(id));
    reports[fi] = evaluate_utterances(fold.fold_id, model, test_ptrs, audio, refs, vocab, emotions);
  };

  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(folds.folds.size())));
  if (jobs == 1) {
    for (std::size_t fi = 0; fi < folds.folds.size(); ++fi) run_fold(fi);
  } else {
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mu;
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back([&]() {
        while (true) {
          std::size_t fi;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= folds.folds.size()) return;
            fi = next++;
          }
          try {
            run_fold(fi);
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(mu);
            fold_errors[fi] = e.what();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (std::size_t fi = 0; fi < fold_errors.size(); ++fi)
      if (!fold_errors[fi].empty())
        throw Error("fold " + std::to_string(fi) + " failed: " + fold_errors[fi]);
  }

  EvaluationReport report = merge_folds(to_string(cfg.taxonomy), emotions,
                                        std::move(reports), cfg.seed);
  write_text_file((fs::path(out_dir) / "report.json").string(),
                  report_to_json(report).dump(2) + "\n");
  write_text_file((fs::path(out_dir) / "report.txt").string(), report_to_text(report));
  return report;
}

/// Trains one model on the full manifest (the cross-corpus workflow) and
/// writes a self-contained checkpoint (vocabulary and taxonomy in the meta)
/// plus the loss curve.
inline std::string run_train_full(const PipelineConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const EmotionSet emotions;
  const auto loaded = load_manifest(cfg.manifest_path, workflow_detail::aliases_for(cfg), emotions);
  const auto& utts = loaded.utterances;
  if (utts.empty()) throw ValidationError("manifest has no usable utterances");

  Lexicon lex;
  if (cfg.taxonomy != TaxonomyKind::Utterance) lex = Lexicon::parse_file(cfg.lexicon_path);
  std::vector<std::string> transcripts;
  for (const auto& u : utts) transcripts.push_back(u.transcript);
  const Taxonomy taxonomy = make_taxonomy(cfg, lex, transcripts);
  const UnitVocabulary vocab = UnitVocabulary::build(taxonomy, emotions);
  vocab.save((fs::path(out_dir) / "vocabulary.txt").string());

  const auto built = build_targets(taxonomy, lex, vocab, utts, cfg.oov_policy);
  if (!built.exclusions.empty())
    save_exclusions((fs::path(out_dir) / "exclusions.jsonl").string(), built.exclusions);
  save_targets((fs::path(out_dir) / "targets.tsv").string(), built.targets, vocab);

  std::map<std::string, const Utterance*> by_id;
  for (const auto& u : utts) by_id[u.id] = &u;
  std::vector<TrainItem> items;
  for (const auto& t : built.targets)
    items.push_back({t.utterance_id,
                     load_utterance_audio(*by_id.at(t.utterance_id), cfg.resample),
                     t.token_ids});

  EncoderConfig enc_cfg = cfg.encoder;
  enc_cfg.vocab_size = vocab.size();
  ToyEncoder model(enc_cfg, mix_seed(cfg.seed, 100));
  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = mix_seed(cfg.seed, 200);
  const TrainState state = train(train_cfg, model, items, out_dir);
  export_loss_curve(state, (fs::path(out_dir) / "loss_curve.csv").string());

  nlohmann::ordered_json meta;
  meta["taxonomy"] = to_string(cfg.taxonomy);
  meta["emotions"] = emotions.ids();
  meta["vocabulary"] = vocab.tokens();
  meta["skipped_infeasible"] = state.skipped_infeasible;
  const std::string ck_path = (fs::path(out_dir) / "model.edck").string();
  save_checkpoint(ck_path, model, state.update_counter, meta);
  return ck_path;
}

struct LoadedModel {
  ToyEncoder encoder;
  UnitVocabulary vocab;
  EmotionSet emotions;
  std::string taxonomy;
};

inline LoadedModel load_model(const std::string& checkpoint_path) {
  Checkpoint ck = load_checkpoint(checkpoint_path);
  if (!ck.meta.contains("vocabulary"))
    throw ValidationError(checkpoint_path + ": checkpoint has no embedded vocabulary");
  LoadedModel m;
  m.encoder = std::move(ck.encoder);
  m.vocab = UnitVocabulary::from_tokens(ck.meta.at("vocabulary").get<std::vector<std::string>>());
  m.emotions = EmotionSet(ck.meta.value("emotions", canonical_emotions()));
  m.taxonomy = ck.meta.value("taxonomy", "unknown");
  return m;
}

/// Decodes a manifest into a hypothesis token file; optionally also writes
/// one EDSR posteriorgram per utterance.
inline void run_decode(const std::string& checkpoint_path, const std::string& manifest_path,
                       const std::string& hyp_out, const std::string& posteriors_dir,
                       bool resample, const std::string& alias_path = "") {
  const LoadedModel m = load_model(checkpoint_path);
  const auto aliases = alias_path.empty() ? EmotionAliasTable::defaults()
                                          : EmotionAliasTable::load(alias_path);
  const auto loaded = load_manifest(manifest_path, aliases, m.emotions);
  if (!posteriors_dir.empty()) std::filesystem::create_directories(posteriors_dir);

  std::map<std::string, std::vector<std::string>> hyps;
  for (const auto& u : loaded.utterances) {
    const Matrix logpost = log_softmax(m.encoder.encode(load_utterance_audio(u, resample)));
    std::vector<std::string> toks;
    for (int id : greedy_decode(logpost)) toks.push_back(m.vocab.token(id));
    hyps[u.id] = std::move(toks);
    if (!posteriors_dir.empty())
      write_posteriorgram(
          (std::filesystem::path(posteriors_dir) / (u.id + ".edsr")).string(), logpost);
  }
  if (!hyp_out.empty()) save_token_file(hyp_out, hyps);
}

/// Classifies a manifest: per-utterance VoteResult JSONL, plus an accuracy
/// report when requested (the cross-corpus evaluation path).
inline EvaluationReport run_classify(const std::string& checkpoint_path,
                                     const std::string& manifest_path,
                                     const std::string& votes_out,
                                     const std::string& report_dir, bool resample,
                                     const std::string& alias_path = "") {
  const LoadedModel m = load_model(checkpoint_path);
  const auto aliases = alias_path.empty() ? EmotionAliasTable::defaults()
                                          : EmotionAliasTable::load(alias_path);
  const auto loaded = load_manifest(manifest_path, aliases, m.emotions);
  if (loaded.utterances.empty()) throw ValidationError("manifest has no usable utterances");

  FoldReport fold;
  fold.fold_id = 0;
  fold.confusion = ConfusionMatrix(m.emotions);
  fold.test_size = static_cast<long>(loaded.utterances.size());
  std::string votes_text;
  for (const auto& u : loaded.utterances) {
    const Matrix logpost = log_softmax(m.encoder.encode(load_utterance_audio(u, resample)));
    const auto decoded = greedy_decode(logpost);
    VoteResult vote = majority_vote(decoded, logpost, m.vocab, m.emotions);
    vote.utterance_id = u.id;
    fold.confusion.add(u.emotion, vote.predicted);
    nlohmann::ordered_json j;
    j["id"] = vote.utterance_id;
    j["predicted"] = vote.predicted;
    j["counts"] = vote.counts;
    j["fallback_used"] = vote.fallback_used;
    votes_text += j.dump() + "\n";
    fold.votes.push_back(std::move(vote));
  }
  if (!votes_out.empty()) write_text_file(votes_out, votes_text);

  EvaluationReport report = merge_folds(m.taxonomy, m.emotions, {fold}, 0);
  if (!report_dir.empty()) {
    std::filesystem::create_directories(report_dir);
    write_text_file((std::filesystem::path(report_dir) / "report.json").string(),
                    report_to_json(report).dump(2) + "\n");
    write_text_file((std::filesystem::path(report_dir) / "report.txt").string(),
                    report_to_text(report));
  }
  return report;
}

/// Decoupled scorer over reference/hypothesis token files. Returns
/// (with-emotion, without-emotion) counts and writes them as JSON.
inline std::pair<AlignmentCounts, AlignmentCounts> run_score(const std::string& ref_path,
                                                             const std::string& hyp_path,
                                                             const std::string& out_json,
                                                             AlignWeights weights) {
  const auto refs = load_token_file(ref_path);
  const auto hyps = load_token_file(hyp_path);
  const AlignmentCounts tagged = score_units(refs, hyps, false, weights);
  const AlignmentCounts stripped = score_units(refs, hyps, true, weights);
  if (!out_json.empty()) {
    nlohmann::ordered_json j;
    j["with_emotion"] = detail::counts_to_json(tagged);
    j["without_emotion"] = detail::counts_to_json(stripped);
    write_text_file(out_json, j.dump(2) + "\n");
  }
  return {tagged, stripped};
}

}  // namespace edsr

#endif  // EDSR_WORKFLOW_HPP
