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

// Command-line front end: emotion recognition through emotion-dependent
// unit recognition. Subcommands cover the whole workflow: synth ->
// build-vocab -> train -> decode/classify -> score, plus speaker-fold
// cross-validation and report formatting.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "edsr/evaluate.hpp"
#include "edsr/synth.hpp"
#include "edsr/workflow.hpp"

namespace {

namespace fs = std::filesystem;

struct CliState {
  edsr::PipelineConfig pipe;
  std::string taxonomy = "phoneme";
  std::string out;
  bool full_scale = false;
};

void write_resolved_config(CLI::App& app, const std::string& out) {
  // every run records the fully resolved configuration next to its outputs
  std::error_code ec;
  std::string path;
  if (fs::is_directory(out) || out.find('.') == std::string::npos) {
    fs::create_directories(out, ec);
    path = (fs::path(out) / "resolved_config.toml").string();
  } else {
    path = out + ".resolved.toml";
  }
  edsr::write_text_file(path, app.config_to_str(true, false));
}

void add_taxonomy_options(CLI::App* cmd, CliState& st) {
  cmd->add_option("--taxonomy", st.taxonomy,
                  "phonetic unit taxonomy: phoneme|broad_class|syllable|utterance")
      ->default_val("phoneme");
  cmd->add_option("--lexicon", st.pipe.lexicon_path, "pronunciation lexicon file");
  cmd->add_option("--broad-classes", st.pipe.broad_class_path,
                  "broad-class map file (default: built-in ARPAbet classes)");
  cmd->add_option("--onsets", st.pipe.onset_path,
                  "legal onset inventory file (default: built-in English onsets)");
  cmd->add_option("--aliases", st.pipe.alias_path,
                  "emotion alias table (default: built-in table)");
}

void add_train_options(CLI::App* cmd, CliState& st) {
  cmd->add_option("--updates", st.pipe.train.total_updates, "total optimizer updates");
  cmd->add_option("--head-only-updates", st.pipe.train.head_only_updates,
                  "updates with the encoder frozen (phase one)");
  cmd->add_option("--lr", st.pipe.train.learning_rate, "learning rate");
  cmd->add_option("--max-tokens", st.pipe.train.max_tokens,
                  "audio-sample budget per batch");
  cmd->add_option("--checkpoint-every", st.pipe.train.checkpoint_every,
                  "checkpoint cadence in updates");
  cmd->add_option("--seed", st.pipe.seed, "master seed for the run");
  cmd->add_flag("--full-scale", st.full_scale,
                "start from the full-scale schedule (15k updates, 10k head-only, "
                "lr 5e-5, 1m max_tokens) instead of the desk-scale preset");
  cmd->add_flag("--resample", st.pipe.resample, "upsample 8 kHz audio at load");
  cmd->add_option("--hidden-dim", st.pipe.encoder.hidden_dim, "encoder width");
  cmd->add_option("--blocks", st.pipe.encoder.n_blocks, "self-attention blocks");
}

/// Applies the --full-scale preset to every schedule field the user did not
/// set explicitly.
void apply_schedule_preset(CLI::App* cmd, CliState& st) {
  if (!st.full_scale) return;
  const edsr::TrainConfig full{};
  if (!cmd->count("--updates")) st.pipe.train.total_updates = full.total_updates;
  if (!cmd->count("--head-only-updates"))
    st.pipe.train.head_only_updates = full.head_only_updates;
  if (!cmd->count("--lr")) st.pipe.train.learning_rate = full.learning_rate;
  if (!cmd->count("--max-tokens")) st.pipe.train.max_tokens = full.max_tokens;
}

int run(int argc, char** argv) {
  CLI::App app{"emotion-dependent speech recognition toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style config file; flags override file values");

  CliState st;

  // ---- synth
  edsr::SynthSpec synth_spec;
  auto* synth = app.add_subcommand("synth", "generate the deterministic toy corpus");
  synth->add_option("--out", st.out, "output directory")->required();
  synth->add_option("--seed", synth_spec.seed, "generation seed");
  synth->add_option("--phonemes", synth_spec.n_pseudo_phonemes, "pseudo-phoneme count");
  synth->add_option("--speakers", synth_spec.n_speakers, "speaker count");
  synth->add_option("--utterances-per-speaker", synth_spec.utterances_per_speaker,
                    "utterances per speaker");
  synth->add_option("--words", synth_spec.n_words, "pseudo-word inventory size");
  synth->add_option("--noise", synth_spec.noise_level, "additive noise level");

  // ---- build-vocab
  auto* build_vocab = app.add_subcommand("build-vocab", "write the emotion-dependent vocabulary");
  build_vocab->add_option("--manifest", st.pipe.manifest_path, "training manifest")->required();
  build_vocab->add_option("--out", st.out, "output vocabulary file")->required();
  add_taxonomy_options(build_vocab, st);

  // ---- train
  auto* train_cmd = app.add_subcommand("train", "fine-tune on the full manifest");
  train_cmd->add_option("--manifest", st.pipe.manifest_path, "training manifest")->required();
  train_cmd->add_option("--out", st.out, "output directory")->required();
  add_taxonomy_options(train_cmd, st);
  add_train_options(train_cmd, st);

  // ---- decode
  std::string checkpoint, hyp_out, posteriors_dir;
  auto* decode = app.add_subcommand("decode", "transcribe a manifest into unit hypotheses");
  decode->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  decode->add_option("--manifest", st.pipe.manifest_path, "manifest to decode")->required();
  decode->add_option("--out", hyp_out, "hypothesis token file");
  decode->add_option("--emit-posteriors", posteriors_dir,
                     "also write one EDSR posteriorgram per utterance here");
  decode->add_option("--aliases", st.pipe.alias_path, "emotion alias table");
  decode->add_flag("--resample", st.pipe.resample, "upsample 8 kHz audio at load");

  // ---- classify
  std::string votes_out, report_dir;
  auto* classify = app.add_subcommand("classify", "utterance emotion by majority vote");
  classify->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  classify->add_option("--manifest", st.pipe.manifest_path, "manifest to classify")->required();
  classify->add_option("--out", votes_out, "per-utterance vote JSONL")->required();
  classify->add_option("--report", report_dir,
                       "also write report.json/report.txt (labeled manifests)");
  classify->add_option("--aliases", st.pipe.alias_path, "emotion alias table");
  classify->add_flag("--resample", st.pipe.resample, "upsample 8 kHz audio at load");

  // ---- score
  std::string ref_path, hyp_path, weights_name = "uniform";
  bool strip_flag = false;
  auto* score = app.add_subcommand("score", "unit error rates from ref/hyp token files");
  score->add_option("--ref", ref_path, "reference token file")->required();
  score->add_option("--hyp", hyp_path, "hypothesis token file")->required();
  score->add_option("--out", st.out, "output JSON")->required();
  score->add_option("--weights", weights_name, "alignment weights: uniform|sctk");
  score->add_flag("--strip-emotion", strip_flag,
                  "print the emotion-stripped rate instead of the tagged one");

  // ---- crossval
  auto* crossval = app.add_subcommand("crossval", "speaker-fold cross-validation");
  crossval->add_option("--manifest", st.pipe.manifest_path, "manifest")->required();
  crossval->add_option("--out", st.out, "output directory")->required();
  crossval->add_option("--kfold", st.pipe.kfold,
                       "fold speakers into k groups (default: leave-one-speaker-out)");
  crossval->add_option("--jobs", st.pipe.jobs, "parallel fold workers");
  add_taxonomy_options(crossval, st);
  add_train_options(crossval, st);

  // ---- report
  std::string report_in, report_out;
  auto* report = app.add_subcommand("report", "format a report.json as text");
  report->add_option("--in", report_in, "report.json produced by crossval/classify")->required();
  report->add_option("--out", report_out, "write the text table here too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help/error text
    return code == 0 ? 0 : 1;
  }

  if (synth->parsed()) {
    const auto corpus = edsr::generate(synth_spec, st.out);
    write_resolved_config(app, st.out);
    std::cout << "wrote " << corpus.utterances.size() << " utterances under " << st.out
              << "\n";
    return 0;
  }

  if (build_vocab->parsed()) {
    st.pipe.taxonomy = edsr::taxonomy_kind_from_string(st.taxonomy);
    const edsr::EmotionSet emotions;
    const auto loaded = edsr::load_manifest(
        st.pipe.manifest_path,
        st.pipe.alias_path.empty() ? edsr::EmotionAliasTable::defaults()
                                   : edsr::EmotionAliasTable::load(st.pipe.alias_path),
        emotions);
    edsr::Lexicon lex;
    if (st.pipe.taxonomy != edsr::TaxonomyKind::Utterance)
      lex = edsr::Lexicon::parse_file(st.pipe.lexicon_path);
    std::vector<std::string> transcripts;
    for (const auto& u : loaded.utterances) transcripts.push_back(u.transcript);
    const auto taxonomy = edsr::make_taxonomy(st.pipe, lex, transcripts);
    const auto vocab = edsr::UnitVocabulary::build(taxonomy, emotions);
    vocab.save(st.out);
    write_resolved_config(app, st.out);
    std::cout << "wrote " << vocab.size() << " tokens to " << st.out << "\n";
    return 0;
  }

  if (train_cmd->parsed()) {
    st.pipe.taxonomy = edsr::taxonomy_kind_from_string(st.taxonomy);
    apply_schedule_preset(train_cmd, st);
    const std::string ck = edsr::run_train_full(st.pipe, st.out);
    write_resolved_config(app, st.out);
    std::cout << "checkpoint: " << ck << "\n";
    return 0;
  }

  if (decode->parsed()) {
    if (hyp_out.empty() && posteriors_dir.empty())
      throw edsr::ValidationError("decode: need --out and/or --emit-posteriors");
    edsr::run_decode(checkpoint, st.pipe.manifest_path, hyp_out, posteriors_dir,
                     st.pipe.resample, st.pipe.alias_path);
    write_resolved_config(app, hyp_out.empty() ? posteriors_dir : hyp_out);
    return 0;
  }

  if (classify->parsed()) {
    const auto rep = edsr::run_classify(checkpoint, st.pipe.manifest_path, votes_out,
                                        report_dir, st.pipe.resample, st.pipe.alias_path);
    write_resolved_config(app, votes_out);
    const auto [wa, ua] = edsr::compute_wa_ua(rep.confusion);
    std::cout << "WA " << edsr::round_pct(wa) << "%  UA " << edsr::round_pct(ua) << "%\n";
    return 0;
  }

  if (score->parsed()) {
    edsr::AlignWeights weights;
    if (weights_name == "uniform")
      weights = edsr::AlignWeights::Uniform;
    else if (weights_name == "sctk")
      weights = edsr::AlignWeights::Sctk;
    else
      throw edsr::ValidationError("unknown --weights: " + weights_name);
    const auto [tagged, stripped] = edsr::run_score(ref_path, hyp_path, st.out, weights);
    write_resolved_config(app, st.out);
    const auto& shown = strip_flag ? stripped : tagged;
    std::cout << (strip_flag ? "without-emotion" : "with-emotion") << " error rate: "
              << edsr::round_pct(shown.error_rate()) << "%\n";
    return 0;
  }

  if (crossval->parsed()) {
    st.pipe.taxonomy = edsr::taxonomy_kind_from_string(st.taxonomy);
    apply_schedule_preset(crossval, st);
    const auto rep = edsr::run_crossval(st.pipe, st.out);
    write_resolved_config(app, st.out);
    const auto [wa, ua] = edsr::compute_wa_ua(rep.confusion);
    std::cout << "WA " << edsr::round_pct(wa) << "%  UA " << edsr::round_pct(ua) << "%\n";
    return 0;
  }

  if (report->parsed()) {
    // rebuild the text table from the JSON artifact
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(edsr::read_text_file(report_in));
    } catch (const nlohmann::json::exception& e) {
      throw edsr::ParseError(report_in + ": " + std::string(e.what()));
    }
    edsr::EvaluationReport rep;
    rep.taxonomy = j.value("taxonomy", "unknown");
    rep.emotions = edsr::EmotionSet(j.at("emotions").get<std::vector<std::string>>());
    rep.seed = j.value("seed", std::uint64_t{0});
    rep.confusion = edsr::ConfusionMatrix(rep.emotions);
    rep.confusion.counts = j.at("confusion").get<std::vector<std::vector<long>>>();
    if (j.contains("unit_errors")) {
      const auto& ue = j.at("unit_errors");
      auto get = [](const nlohmann::json& c) {
        edsr::AlignmentCounts a;
        a.S = c.at("S").get<long>();
        a.D = c.at("D").get<long>();
        a.I = c.at("I").get<long>();
        a.N = c.at("N").get<long>();
        return a;
      };
      rep.tagged = get(ue.at("with_emotion"));
      rep.stripped = get(ue.at("without_emotion"));
    }
    rep.excluded_from_scoring = j.value("excluded_from_scoring", 0L);
    const std::string text = edsr::report_to_text(rep);
    std::cout << text;
    if (!report_out.empty()) edsr::write_text_file(report_out, text);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const edsr::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const edsr::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const edsr::CapabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
}
