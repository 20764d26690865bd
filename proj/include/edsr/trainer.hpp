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
#ifndef EDSR_TRAINER_HPP
#define EDSR_TRAINER_HPP

#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "edsr/acoustic.hpp"
#include "edsr/common.hpp"
#include "edsr/ctc.hpp"
#include "edsr/features.hpp"

namespace edsr {

/// Fine-tuning schedule. Default values are the full-scale settings
/// (15k updates, 10k head-only, lr 5e-5, 1m-sample batches); desk_scale()
/// shrinks them for the toy encoder.
struct TrainConfig {
  long total_updates = 15000;
  long head_only_updates = 10000;
  double learning_rate = 5e-5;
  long max_tokens = 1000000;  // summed waveform samples per batch
  std::uint64_t seed = 1;
  long checkpoint_every = 1000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double grad_clip = 5.0;  // global norm; <= 0 disables

  /// 1/10 of the full schedule plus a learning rate suited to training the
  /// toy encoder from scratch.
  static TrainConfig desk_scale() {
    TrainConfig c;
    c.total_updates = 1500;
    c.head_only_updates = 1000;
    c.learning_rate = 1e-3;
    c.max_tokens = 480000;
    return c;
  }
};

/// One training example: audio plus its emotion-tagged target ids.
struct TrainItem {
  std::string id;
  Waveform audio;
  std::vector<int> target_ids;
};

struct TrainState {
  long update_counter = 0;
  std::vector<std::pair<long, double>> loss_history;  // (update, mean batch loss)
  long skipped_infeasible = 0;
};

/// Length-sorted greedy packing under the sample budget. Batch order is
/// reshuffled deterministically per epoch; within a batch, items keep
/// descending length so padding stays small in any downstream layout.
inline std::vector<std::vector<std::size_t>> make_batches(
    const std::vector<long>& sample_counts, const std::vector<std::string>& ids,
    long max_tokens, std::uint64_t seed, long epoch) {
  if (sample_counts.size() != ids.size())
    throw ValidationError("make_batches: sizes and ids disagree");
  for (std::size_t i = 0; i < sample_counts.size(); ++i)
    if (sample_counts[i] > max_tokens)
      throw ValidationError("utterance " + ids[i] + " (" +
                            std::to_string(sample_counts[i]) +
                            " samples) exceeds the max_tokens budget of " +
                            std::to_string(max_tokens));

  std::vector<std::size_t> order(sample_counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sample_counts[a] > sample_counts[b];
  });

  std::vector<std::vector<std::size_t>> batches;
  long used = 0;
  for (std::size_t idx : order) {
    if (batches.empty() || used + sample_counts[idx] > max_tokens) {
      batches.emplace_back();
      used = 0;
    }
    batches.back().push_back(idx);
    used += sample_counts[idx];
  }
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(epoch)));
  rng.shuffle(batches);
  return batches;
}

/// Observer invoked after every optimizer step (checkpoint probes, logging).
using UpdateCallback = std::function<void(const TrainState&, const ToyEncoder&)>;

/// Runs the two-phase fine-tuning loop: exactly cfg.total_updates Adam
/// steps, with every encoder-scope parameter bitwise frozen for the first
/// cfg.head_only_updates of them. Infeasible utterances (fewer frames than
/// the CTC target needs) are skipped and counted. Returns the final state;
/// checkpoints land in out_dir when provided.
inline TrainState train(const TrainConfig& cfg, ToyEncoder& model,
                        const std::vector<TrainItem>& items,
                        const std::string& out_dir = "",
                        const UpdateCallback& on_update = nullptr) {
  if (cfg.head_only_updates < 0 || cfg.head_only_updates > cfg.total_updates)
    throw ValidationError("head_only_updates must lie in [0, total_updates]");
  if (model.config().vocab_size < 2)
    throw ValidationError("model head has no vocabulary");

  LogMelConfig mel;
  mel.frames = model.config().frames;
  mel.n_mels = model.config().feature_dim;

  // Precompute features once; drop infeasible items up front.
  struct Prepared {
    const TrainItem* item;
    Matrix feats;
    long samples;
  };
  std::vector<Prepared> data;
  TrainState state;
  for (const auto& it : items) {
    for (int id : it.target_ids)
      if (id <= 0 || id >= model.config().vocab_size)
        throw ValidationError("target id " + std::to_string(id) +
                              " out of range for utterance " + it.id);
    const long frames = mel.frames.frames_for(static_cast<long>(it.audio.samples.size()));
    if (frames < ctc_min_frames(it.target_ids)) {
      state.skipped_infeasible++;
      continue;
    }
    data.push_back({&it, log_mel_features(it.audio, mel), static_cast<long>(it.audio.samples.size())});
  }
  if (data.empty())
    throw ValidationError("no trainable utterances: all " +
                          std::to_string(items.size()) + " are infeasible or absent");

  std::vector<long> sizes;
  std::vector<std::string> ids;
  for (const auto& d : data) {
    sizes.push_back(d.samples);
    ids.push_back(d.item->id);
  }

  // Adam state, one slot per parameter tensor.
  auto& params = model.parameters();
  std::vector<Matrix> m(params.size()), v(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = Matrix::Zero(params[i].value.rows(), params[i].value.cols());
    v[i] = Matrix::Zero(params[i].value.rows(), params[i].value.cols());
  }
  long adam_t = 0;

  const bool checkpointing = !out_dir.empty();
  if (checkpointing) std::filesystem::create_directories(out_dir);
  auto checkpoint_path = [&](const std::string& tag) {
    return (std::filesystem::path(out_dir) / ("checkpoint_" + tag + ".edck")).string();
  };

  long epoch = 0;
  while (state.update_counter < cfg.total_updates) {
    const auto batches = make_batches(sizes, ids, cfg.max_tokens, cfg.seed, epoch);
    for (const auto& batch : batches) {
      if (state.update_counter >= cfg.total_updates) break;
      const bool head_only = state.update_counter < cfg.head_only_updates;

      model.zero_grads();
      double batch_loss = 0.0;
      for (std::size_t idx : batch) {
        ToyEncoder::Cache cache;
        const Matrix logits = model.forward(data[idx].feats, &cache);
        const CtcResult res = ctc_loss_grad(log_softmax(logits), data[idx].item->target_ids);
        batch_loss += res.loss;
        model.backward(cache, res.grad_logits, head_only);
      }
      batch_loss /= static_cast<double>(batch.size());
      if (!std::isfinite(batch_loss)) {
        if (checkpointing) save_checkpoint(checkpoint_path("diagnostic"), model, state.update_counter);
        throw Error("non-finite training loss at update " +
                    std::to_string(state.update_counter + 1) +
                    (checkpointing ? " (diagnostic checkpoint written)" : ""));
      }

      const double inv_batch = 1.0 / static_cast<double>(batch.size());
      double sq_norm = 0.0;
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (head_only && params[i].encoder_scope) continue;
        params[i].grad *= inv_batch;
        sq_norm += params[i].grad.squaredNorm();
      }
      double clip_scale = 1.0;
      if (cfg.grad_clip > 0.0) {
        const double norm = std::sqrt(sq_norm);
        if (norm > cfg.grad_clip) clip_scale = cfg.grad_clip / norm;
      }

      ++adam_t;
      const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam_t));
      const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam_t));
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (head_only && params[i].encoder_scope) continue;
        const Matrix g = params[i].grad * clip_scale;
        m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * g;
        v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * g.cwiseProduct(g);
        const Matrix mhat = m[i] / bc1;
        const Matrix vhat = v[i] / bc2;
        params[i].value -=
            cfg.learning_rate * mhat.cwiseQuotient(
                                    (vhat.array().sqrt() + cfg.adam_eps).matrix());
      }

      state.update_counter++;
      state.loss_history.emplace_back(state.update_counter, batch_loss);
      if (checkpointing && cfg.checkpoint_every > 0 &&
          state.update_counter % cfg.checkpoint_every == 0)
        save_checkpoint(checkpoint_path(std::to_string(state.update_counter)), model,
                        state.update_counter);
      if (on_update) on_update(state, model);
    }
    ++epoch;
  }
  if (checkpointing) save_checkpoint(checkpoint_path("final"), model, state.update_counter);
  return state;
}

/// Two-column CSV of the training loss curve.
inline void export_loss_curve(const TrainState& state, const std::string& path) {
  if (state.loss_history.empty())
    throw ValidationError("loss history is empty; nothing to export");
  std::ostringstream out;
  out << "update,loss\n";
  for (const auto& [update, loss] : state.loss_history) out << update << "," << loss << "\n";
  write_text_file(path, out.str());
}

}  // namespace edsr

#endif  // EDSR_TRAINER_HPP
