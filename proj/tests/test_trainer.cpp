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
#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <set>

#include "edsr/trainer.hpp"
#include "test_support.hpp"

using namespace edsr;

namespace {

EncoderConfig small_config(int vocab) {
  EncoderConfig cfg;
  cfg.feature_dim = 8;
  cfg.hidden_dim = 8;
  cfg.n_heads = 2;
  cfg.n_blocks = 1;
  cfg.conv_kernel = 3;
  cfg.ffn_dim = 12;
  cfg.vocab_size = vocab;
  return cfg;
}

/// Tiny corpus: tone frequency encodes the single target token.
std::vector<TrainItem> tone_corpus(int n_items, int vocab) {
  std::vector<TrainItem> items;
  Rng rng(5);
  for (int i = 0; i < n_items; ++i) {
    const int token = 1 + i % (vocab - 1);
    Waveform w;
    w.sample_rate = 16000;
    w.samples.resize(4000 + 320 * (i % 3));
    const double freq = 300.0 + 600.0 * token;
    for (std::size_t s = 0; s < w.samples.size(); ++s)
      w.samples[s] = 0.4 * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(s) / 16000.0) +
                     0.01 * rng.normal();
    items.push_back({"item" + std::to_string(i), std::move(w), {token}});
  }
  return items;
}

TrainConfig quick_config(long updates, long head_only) {
  TrainConfig cfg;
  cfg.total_updates = updates;
  cfg.head_only_updates = head_only;
  cfg.learning_rate = 2e-3;
  cfg.max_tokens = 20000;
  cfg.seed = 11;
  cfg.checkpoint_every = 0;
  return cfg;
}

}  // namespace

TEST_CASE("greedy packing splits 600k+500k but keeps three 300k together", "[trainer]") {
  const auto two = make_batches({600000, 500000}, {"a", "b"}, 1000000, 1, 0);
  REQUIRE(two.size() == 2);

  const auto one = make_batches({300000, 300000, 300000}, {"a", "b", "c"}, 1000000, 1, 0);
  REQUIRE(one.size() == 1);
  REQUIRE(one[0].size() == 3);
}

TEST_CASE("oversized utterances are rejected by name", "[trainer]") {
  REQUIRE_THROWS_WITH(make_batches({1200000}, {"big_one"}, 1000000, 1, 0),
                      Catch::Matchers::ContainsSubstring("big_one"));
}

TEST_CASE("every batch respects the budget and every item is consumed", "[trainer]") {
  Rng rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 40));
    std::vector<long> sizes;
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) {
      sizes.push_back(rng.uniform_int(1000, 90000));
      ids.push_back("u" + std::to_string(i));
    }
    const auto batches = make_batches(sizes, ids, 100000, 7, trial);
    std::set<std::size_t> seen;
    for (const auto& b : batches) {
      long sum = 0;
      for (std::size_t idx : b) {
        sum += sizes[idx];
        REQUIRE(seen.insert(idx).second);
      }
      REQUIRE(sum <= 100000);
    }
    REQUIRE(seen.size() == sizes.size());
  }
}

TEST_CASE("batch order reshuffles by epoch but deterministically", "[trainer]") {
  std::vector<long> sizes;
  std::vector<std::string> ids;
  for (int i = 0; i < 24; ++i) {
    sizes.push_back(3000 + i * 100);
    ids.push_back("u" + std::to_string(i));
  }
  const auto e0 = make_batches(sizes, ids, 10000, 3, 0);
  const auto e0_again = make_batches(sizes, ids, 10000, 3, 0);
  const auto e1 = make_batches(sizes, ids, 10000, 3, 1);
  REQUIRE(e0 == e0_again);
  REQUIRE(e0 != e1);  // different epoch, different order
}

TEST_CASE("training runs exactly total_updates steps and logs each one", "[trainer]") {
  auto items = tone_corpus(6, 4);
  ToyEncoder model(small_config(4), 3);
  const auto state = train(quick_config(17, 5), model, items);
  REQUIRE(state.update_counter == 17);
  REQUIRE(state.loss_history.size() == 17);
  for (std::size_t i = 0; i < state.loss_history.size(); ++i)
    REQUIRE(state.loss_history[i].first == static_cast<long>(i) + 1);
}

TEST_CASE("encoder parameters stay bitwise frozen while head-only", "[trainer]") {
  auto items = tone_corpus(6, 4);

  SECTION("freeze covering the whole run leaves the encoder untouched") {
    ToyEncoder model(small_config(4), 3);
    const std::string before = model.scope_bytes(true);
    const std::string head_before = model.scope_bytes(false);
    train(quick_config(12, 12), model, items);
    REQUIRE(model.scope_bytes(true) == before);
    REQUIRE(model.scope_bytes(false) != head_before);
  }

  SECTION("unfreeze happens exactly after head_only_updates") {
    ToyEncoder model(small_config(4), 3);
    const std::string init_bytes = model.scope_bytes(true);
    std::string bytes_at_5;
    train(quick_config(10, 5), model, items, "",
          [&](const TrainState& st, const ToyEncoder& m) {
            if (st.update_counter == 5) bytes_at_5 = m.scope_bytes(true);
          });
    REQUIRE(bytes_at_5 == init_bytes);
    REQUIRE(model.scope_bytes(true) != init_bytes);
  }
}

TEST_CASE("training is deterministic in the seed", "[trainer]") {
  auto items = tone_corpus(5, 4);
  ToyEncoder a(small_config(4), 3), b(small_config(4), 3);
  const auto sa = train(quick_config(9, 3), a, items);
  const auto sb = train(quick_config(9, 3), b, items);
  REQUIRE(sa.loss_history == sb.loss_history);
  REQUIRE(a.scope_bytes(true) == b.scope_bytes(true));
  REQUIRE(a.scope_bytes(false) == b.scope_bytes(false));
}

TEST_CASE("loss decreases on the tone corpus", "[trainer]") {
  auto items = tone_corpus(8, 4);
  ToyEncoder model(small_config(4), 3);
  const auto state = train(quick_config(60, 20), model, items);
  double first = 0.0, last = 0.0;
  for (int i = 0; i < 5; ++i) {
    first += state.loss_history[static_cast<std::size_t>(i)].second;
    last += state.loss_history[state.loss_history.size() - 1 - static_cast<std::size_t>(i)].second;
  }
  REQUIRE(last < first);
}

TEST_CASE("infeasible utterances are skipped and counted", "[trainer]") {
  auto items = tone_corpus(4, 4);
  // 4000 samples -> 12 frames; a 20-token target cannot fit
  items[0].target_ids.assign(20, 1);
  ToyEncoder model(small_config(4), 3);
  const auto state = train(quick_config(4, 0), model, items);
  REQUIRE(state.skipped_infeasible == 1);

  for (auto& it : items) it.target_ids.assign(30, 2);
  ToyEncoder model2(small_config(4), 3);
  REQUIRE_THROWS_WITH(train(quick_config(4, 0), model2, items),
                      Catch::Matchers::ContainsSubstring("infeasible"));
}

TEST_CASE("loss curve exports as a parseable two-column csv", "[trainer]") {
  edsr_test::TempDir tmp;
  TrainState state;
  state.loss_history = {{1, 3.5}, {2, 2.25}, {3, 1.125}};
  export_loss_curve(state, tmp.file("loss.csv"));
  const std::string text = edsr_test::read_bytes(tmp.file("loss.csv"));
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  REQUIRE(header == "update,loss");
  long prev_update = 0;
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const long update = std::stol(line.substr(0, comma));
    const double loss = std::stod(line.substr(comma + 1));
    REQUIRE(update > prev_update);  // monotone update column
    prev_update = update;
    REQUIRE(loss == Catch::Approx(state.loss_history[static_cast<std::size_t>(rows)].second));
    ++rows;
  }
  REQUIRE(rows == 3);

  TrainState empty;
  REQUIRE_THROWS_AS(export_loss_curve(empty, tmp.file("none.csv")), ValidationError);
}

TEST_CASE("checkpoints appear at the configured cadence plus final", "[trainer]") {
  edsr_test::TempDir tmp;
  auto items = tone_corpus(4, 4);
  ToyEncoder model(small_config(4), 3);
  auto cfg = quick_config(10, 0);
  cfg.checkpoint_every = 4;
  train(cfg, model, items, tmp.str());
  REQUIRE(std::filesystem::exists(tmp.file("checkpoint_4.edck")));
  REQUIRE(std::filesystem::exists(tmp.file("checkpoint_8.edck")));
  REQUIRE(std::filesystem::exists(tmp.file("checkpoint_final.edck")));
  const auto ck = load_checkpoint(tmp.file("checkpoint_final.edck"));
  REQUIRE(ck.update_counter == 10);
}
