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
#ifndef EDSR_ACOUSTIC_HPP
#define EDSR_ACOUSTIC_HPP

#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "edsr/common.hpp"
#include "edsr/ctc.hpp"
#include "edsr/features.hpp"

namespace edsr {

/// Geometry and sizes of the toy encoder: log-mel frontend, two 1-d
/// convolutions, two pre-LN self-attention blocks, linear head.
struct EncoderConfig {
  FrameGeometry frames{};
  int feature_dim = 40;
  int hidden_dim = 64;
  int n_heads = 4;
  int n_blocks = 2;
  int conv_kernel = 5;
  int ffn_dim = 128;
  int vocab_size = 0;

  nlohmann::ordered_json to_json() const {
    return {{"window", frames.window},   {"hop", frames.hop},
            {"feature_dim", feature_dim}, {"hidden_dim", hidden_dim},
            {"n_heads", n_heads},         {"n_blocks", n_blocks},
            {"conv_kernel", conv_kernel}, {"ffn_dim", ffn_dim},
            {"vocab_size", vocab_size}};
  }

  static EncoderConfig from_json(const nlohmann::json& j) {
    EncoderConfig c;
    c.frames.window = j.at("window").get<int>();
    c.frames.hop = j.at("hop").get<int>();
    c.feature_dim = j.at("feature_dim").get<int>();
    c.hidden_dim = j.at("hidden_dim").get<int>();
    c.n_heads = j.at("n_heads").get<int>();
    c.n_blocks = j.at("n_blocks").get<int>();
    c.conv_kernel = j.at("conv_kernel").get<int>();
    c.ffn_dim = j.at("ffn_dim").get<int>();
    c.vocab_size = j.at("vocab_size").get<int>();
    return c;
  }
};

/// A named parameter tensor. The encoder/head partition drives the
/// two-phase training schedule.
struct Tensor {
  std::string name;
  bool encoder_scope = true;
  Matrix value;
  Matrix grad;
};

namespace detail {

inline Matrix positional_encoding(long T, int dim) {
  Matrix pe(T, dim);
  for (long t = 0; t < T; ++t)
    for (int i = 0; i < dim; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(i / 2 * 2) / dim);
      pe(t, i) = (i % 2 == 0) ? std::sin(t * rate) : std::cos(t * rate);
    }
  return pe;
}

/// y = x_hat .* g + b rowwise; returns x_hat and 1/std per row for backward.
inline Matrix layer_norm(const Matrix& x, const Matrix& g, const Matrix& b,
                         Matrix& x_hat, Eigen::VectorXd& inv_std) {
  const long T = x.rows();
  const int H = static_cast<int>(x.cols());
  x_hat.resize(T, H);
  inv_std.resize(T);
  Matrix y(T, H);
  for (long t = 0; t < T; ++t) {
    const double mean = x.row(t).mean();
    const double var = (x.row(t).array() - mean).square().mean();
    const double is = 1.0 / std::sqrt(var + 1e-6);
    inv_std(t) = is;
    x_hat.row(t) = (x.row(t).array() - mean) * is;
    y.row(t) = x_hat.row(t).cwiseProduct(g.row(0)) + b.row(0);
  }
  return y;
}

inline Matrix layer_norm_backward(const Matrix& dy, const Matrix& x_hat,
                                  const Eigen::VectorXd& inv_std, const Matrix& g,
                                  Matrix& dg, Matrix& db) {
  const long T = dy.rows();
  const int H = static_cast<int>(dy.cols());
  Matrix dx(T, H);
  for (long t = 0; t < T; ++t) {
    const Eigen::RowVectorXd dxhat = dy.row(t).cwiseProduct(g.row(0));
    const double m1 = dxhat.mean();
    const double m2 = dxhat.cwiseProduct(x_hat.row(t)).mean();
    dx.row(t) = (dxhat.array() - m1 - x_hat.row(t).array() * m2) * inv_std(t);
  }
  dg.row(0) += (dy.array() * x_hat.array()).colwise().sum().matrix();
  db.row(0) += dy.colwise().sum();
  return dx;
}

/// Unrolls a T x C sequence into T x (k*C) with zero padding, tap-major.
inline Matrix im2col(const Matrix& x, int kernel) {
  const long T = x.rows();
  const int C = static_cast<int>(x.cols());
  const int pad = (kernel - 1) / 2;
  Matrix col = Matrix::Zero(T, static_cast<long>(kernel) * C);
  for (int j = 0; j < kernel; ++j) {
    const long src_lo = std::max<long>(0, pad - j);
    const long src_hi = std::min<long>(T, T + pad - j);
    for (long t = src_lo; t < src_hi; ++t)
      col.block(t, static_cast<long>(j) * C, 1, C) = x.row(t + j - pad);
  }
  return col;
}

inline Matrix col2im(const Matrix& dcol, long T, int C, int kernel) {
  const int pad = (kernel - 1) / 2;
  Matrix dx = Matrix::Zero(T, C);
  for (int j = 0; j < kernel; ++j) {
    const long src_lo = std::max<long>(0, pad - j);
    const long src_hi = std::min<long>(T, T + pad - j);
    for (long t = src_lo; t < src_hi; ++t)
      dx.row(t + j - pad) += dcol.block(t, static_cast<long>(j) * C, 1, C);
  }
  return dx;
}

}  // namespace detail

/// Desk-scale acoustic encoder with exact hand-written gradients.
class ToyEncoder {
 public:
  ToyEncoder() = default;

  explicit ToyEncoder(const EncoderConfig& cfg, std::uint64_t seed = 1) {
    init(cfg, seed);
  }

  void init(const EncoderConfig& cfg, std::uint64_t seed) {
    if (cfg.vocab_size < 2) throw ValidationError("encoder needs vocab_size >= 2");
    if (cfg.hidden_dim % cfg.n_heads != 0)
      throw ValidationError("hidden_dim must be divisible by n_heads");
    if (cfg.conv_kernel % 2 != 1) throw ValidationError("conv kernel must be odd");
    cfg_ = cfg;
    seed_ = seed;
    params_.clear();
    index_.clear();

    Rng rng(seed);
    auto add = [&](const std::string& name, long rows, long cols, bool encoder_scope,
                   const char* init_kind) {
      Tensor t;
      t.name = name;
      t.encoder_scope = encoder_scope;
      t.value.resize(rows, cols);
      t.grad = Matrix::Zero(rows, cols);
      if (std::strcmp(init_kind, "he") == 0) {
        const double scale = std::sqrt(2.0 / static_cast<double>(rows));
        for (long r = 0; r < rows; ++r)
          for (long c = 0; c < cols; ++c) t.value(r, c) = rng.normal() * scale;
      } else if (std::strcmp(init_kind, "small") == 0) {
        for (long r = 0; r < rows; ++r)
          for (long c = 0; c < cols; ++c) t.value(r, c) = rng.normal() * 0.01;
      } else if (std::strcmp(init_kind, "one") == 0) {
        t.value.setOnes();
      } else {
        t.value.setZero();
      }
      index_[name] = params_.size();
      params_.push_back(std::move(t));
    };

    const int H = cfg.hidden_dim;
    const int K = cfg.conv_kernel;
    add("conv1.w", static_cast<long>(K) * cfg.feature_dim, H, true, "he");
    add("conv1.b", 1, H, true, "zero");
    add("conv2.w", static_cast<long>(K) * H, H, true, "he");
    add("conv2.b", 1, H, true, "zero");
    for (int b = 0; b < cfg.n_blocks; ++b) {
      const std::string p = "blk" + std::to_string(b) + ".";
      add(p + "ln1.g", 1, H, true, "one");
      add(p + "ln1.b", 1, H, true, "zero");
      add(p + "attn.wq", H, H, true, "he");
      add(p + "attn.bq", 1, H, true, "zero");
      add(p + "attn.wk", H, H, true, "he");
      add(p + "attn.bk", 1, H, true, "zero");
      add(p + "attn.wv", H, H, true, "he");
      add(p + "attn.bv", 1, H, true, "zero");
      add(p + "attn.wo", H, H, true, "he");
      add(p + "attn.bo", 1, H, true, "zero");
      add(p + "ln2.g", 1, H, true, "one");
      add(p + "ln2.b", 1, H, true, "zero");
      add(p + "ffn.w1", H, cfg.ffn_dim, true, "he");
      add(p + "ffn.b1", 1, cfg.ffn_dim, true, "zero");
      add(p + "ffn.w2", cfg.ffn_dim, H, true, "he");
      add(p + "ffn.b2", 1, H, true, "zero");
    }
    add("head.w", H, cfg.vocab_size, false, "small");
    add("head.b", 1, cfg.vocab_size, false, "zero");
  }

  const EncoderConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }

  std::vector<Tensor>& parameters() { return params_; }
  const std::vector<Tensor>& parameters() const { return params_; }

  Tensor& param(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValidationError("no parameter named " + name);
    return params_[it->second];
  }
  const Tensor& param(const std::string& name) const {
    return const_cast<ToyEncoder*>(this)->param(name);
  }

  void zero_grads() {
    for (auto& t : params_) t.grad.setZero();
  }

  /// Byte image of all encoder-scope (or head-scope) parameters; used by the
  /// freeze tests and checkpoint comparisons.
  std::string scope_bytes(bool encoder_scope) const {
    std::string out;
    for (const auto& t : params_) {
      if (t.encoder_scope != encoder_scope) continue;
      const char* p = reinterpret_cast<const char*>(t.value.data());
      out.append(p, t.value.size() * sizeof(double));
    }
    return out;
  }

  /// Per-utterance activations kept for the backward pass.
  struct Cache {
    Matrix feats;
    Matrix col1, pre1, act1;
    Matrix col2, pre2, act2;
    struct Block {
      Matrix in;
      Matrix xhat1, n1;
      Eigen::VectorXd inv_std1;
      Matrix q, k, v;
      std::vector<Matrix> attn;  // per-head softmax probs, T x T
      Matrix context;            // concatenated head outputs
      Matrix res1;
      Matrix xhat2, n2;
      Eigen::VectorXd inv_std2;
      Matrix f_pre, f_act;
    };
    std::vector<Block> blocks;
    Matrix encoded;  // head input
  };

  /// T x V logits from a T x feature_dim feature matrix.
  Matrix forward(const Matrix& feats, Cache* cache = nullptr) const {
    if (feats.cols() != cfg_.feature_dim)
      throw ValidationError("feature dim mismatch: " + std::to_string(feats.cols()));
    const long T = feats.rows();
    const int H = cfg_.hidden_dim;
    const int heads = cfg_.n_heads;
    const int dh = H / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    Cache local;
    Cache& c = cache ? *cache : local;
    c.feats = feats;

    c.col1 = detail::im2col(feats, cfg_.conv_kernel);
    c.pre1 = (c.col1 * value("conv1.w")).rowwise() + row(value("conv1.b"));
    c.act1 = c.pre1.cwiseMax(0.0);
    c.col2 = detail::im2col(c.act1, cfg_.conv_kernel);
    c.pre2 = (c.col2 * value("conv2.w")).rowwise() + row(value("conv2.b"));
    c.act2 = c.pre2.cwiseMax(0.0);

    Matrix x = c.act2 + detail::positional_encoding(T, H);
    c.blocks.resize(static_cast<std::size_t>(cfg_.n_blocks));
    for (int b = 0; b < cfg_.n_blocks; ++b) {
      auto& blk = c.blocks[static_cast<std::size_t>(b)];
      const std::string p = "blk" + std::to_string(b) + ".";
      blk.in = x;
      blk.n1 = detail::layer_norm(x, value(p + "ln1.g"), value(p + "ln1.b"),
                                  blk.xhat1, blk.inv_std1);
      blk.q = (blk.n1 * value(p + "attn.wq")).rowwise() + row(value(p + "attn.bq"));
      blk.k = (blk.n1 * value(p + "attn.wk")).rowwise() + row(value(p + "attn.bk"));
      blk.v = (blk.n1 * value(p + "attn.wv")).rowwise() + row(value(p + "attn.bv"));
      blk.attn.resize(static_cast<std::size_t>(heads));
      blk.context.resize(T, H);
      for (int j = 0; j < heads; ++j) {
        Matrix scores = blk.q.middleCols(j * dh, dh) *
                        blk.k.middleCols(j * dh, dh).transpose() * scale;
        Matrix& probs = blk.attn[static_cast<std::size_t>(j)];
        probs.resize(T, T);
        for (long t = 0; t < T; ++t) {
          const double m = scores.row(t).maxCoeff();
          Eigen::RowVectorXd e = (scores.row(t).array() - m).exp();
          probs.row(t) = e / e.sum();
        }
        blk.context.middleCols(j * dh, dh) = probs * blk.v.middleCols(j * dh, dh);
      }
      const Matrix attn_out =
          (blk.context * value(p + "attn.wo")).rowwise() + row(value(p + "attn.bo"));
      blk.res1 = x + attn_out;
      blk.n2 = detail::layer_norm(blk.res1, value(p + "ln2.g"), value(p + "ln2.b"),
                                  blk.xhat2, blk.inv_std2);
      blk.f_pre = (blk.n2 * value(p + "ffn.w1")).rowwise() + row(value(p + "ffn.b1"));
      blk.f_act = blk.f_pre.cwiseMax(0.0);
      const Matrix ffn_out =
          (blk.f_act * value(p + "ffn.w2")).rowwise() + row(value(p + "ffn.b2"));
      x = blk.res1 + ffn_out;
    }
    c.encoded = x;
    return (x * value("head.w")).rowwise() + row(value("head.b"));
  }

  /// Accumulates parameter gradients for one utterance. With head_only set,
  /// backpropagation stops at the head so encoder gradients stay zero.
  void backward(const Cache& c, const Matrix& dlogits, bool head_only = false) {
    const long T = c.feats.rows();
    const int H = cfg_.hidden_dim;
    const int heads = cfg_.n_heads;
    const int dh = H / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    grad("head.w") += c.encoded.transpose() * dlogits;
    grad("head.b").row(0) += dlogits.colwise().sum();
    if (head_only) return;

    Matrix dx = dlogits * value("head.w").transpose();
    for (int b = cfg_.n_blocks - 1; b >= 0; --b) {
      const auto& blk = c.blocks[static_cast<std::size_t>(b)];
      const std::string p = "blk" + std::to_string(b) + ".";

      // out = res1 + ffn(n2)
      const Matrix& dout = dx;
      grad(p + "ffn.w2") += blk.f_act.transpose() * dout;
      grad(p + "ffn.b2").row(0) += dout.colwise().sum();
      Matrix df_act = dout * value(p + "ffn.w2").transpose();
      Matrix df_pre = (blk.f_pre.array() > 0.0).select(df_act, 0.0);
      grad(p + "ffn.w1") += blk.n2.transpose() * df_pre;
      grad(p + "ffn.b1").row(0) += df_pre.colwise().sum();
      const Matrix dn2 = df_pre * value(p + "ffn.w1").transpose();
      Matrix dres1 = detail::layer_norm_backward(dn2, blk.xhat2, blk.inv_std2,
                                                 value(p + "ln2.g"),
                                                 grad(p + "ln2.g"), grad(p + "ln2.b"));
      dres1 += dout;

      // res1 = in + wo(context)
      grad(p + "attn.wo") += blk.context.transpose() * dres1;
      grad(p + "attn.bo").row(0) += dres1.colwise().sum();
      const Matrix dcontext = dres1 * value(p + "attn.wo").transpose();
      Matrix dq(T, H), dk(T, H), dv(T, H);
      for (int j = 0; j < heads; ++j) {
        const Matrix& probs = blk.attn[static_cast<std::size_t>(j)];
        const Matrix do_j = dcontext.middleCols(j * dh, dh);
        const Matrix v_j = blk.v.middleCols(j * dh, dh);
        Matrix dprobs = do_j * v_j.transpose();
        dv.middleCols(j * dh, dh) = probs.transpose() * do_j;
        Matrix dscores(T, T);
        for (long t = 0; t < T; ++t) {
          const double dot = dprobs.row(t).dot(probs.row(t));
          dscores.row(t) = probs.row(t).cwiseProduct(((dprobs.row(t).array() - dot).matrix()));
        }
        dq.middleCols(j * dh, dh) = dscores * blk.k.middleCols(j * dh, dh) * scale;
        dk.middleCols(j * dh, dh) = dscores.transpose() * blk.q.middleCols(j * dh, dh) * scale;
      }
      Matrix dn1 = Matrix::Zero(T, H);
      grad(p + "attn.wq") += blk.n1.transpose() * dq;
      grad(p + "attn.bq").row(0) += dq.colwise().sum();
      dn1 += dq * value(p + "attn.wq").transpose();
      grad(p + "attn.wk") += blk.n1.transpose() * dk;
      grad(p + "attn.bk").row(0) += dk.colwise().sum();
      dn1 += dk * value(p + "attn.wk").transpose();
      grad(p + "attn.wv") += blk.n1.transpose() * dv;
      grad(p + "attn.bv").row(0) += dv.colwise().sum();
      dn1 += dv * value(p + "attn.wv").transpose();
      Matrix din = detail::layer_norm_backward(dn1, blk.xhat1, blk.inv_std1,
                                               value(p + "ln1.g"),
                                               grad(p + "ln1.g"), grad(p + "ln1.b"));
      din += dres1;
      dx = din;
    }

    // x0 = act2 + positional encoding
    Matrix dpre2 = (c.pre2.array() > 0.0).select(dx, 0.0);
    grad("conv2.w") += c.col2.transpose() * dpre2;
    grad("conv2.b").row(0) += dpre2.colwise().sum();
    const Matrix dcol2 = dpre2 * value("conv2.w").transpose();
    const Matrix dact1 = detail::col2im(dcol2, T, H, cfg_.conv_kernel);
    Matrix dpre1 = (c.pre1.array() > 0.0).select(dact1, 0.0);
    grad("conv1.w") += c.col1.transpose() * dpre1;
    grad("conv1.b").row(0) += dpre1.colwise().sum();
  }

  /// Full inference path: log-mel features then forward.
  Matrix encode(const Waveform& w) const {
    LogMelConfig mel;
    mel.frames = cfg_.frames;
    mel.n_mels = cfg_.feature_dim;
    return forward(log_mel_features(w, mel));
  }

 private:
  const Matrix& value(const std::string& name) const { return param(name).value; }
  Matrix& grad(const std::string& name) { return param(name).grad; }
  static Eigen::RowVectorXd row(const Matrix& m) { return m.row(0); }

  EncoderConfig cfg_;
  std::uint64_t seed_ = 0;
  std::vector<Tensor> params_;
  std::map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// checkpoints: magic "EDCK", u32 version, u64 header length, JSON header
// (config, seed, update counter, tensor table, free-form meta), then raw
// float64 tensor data in table order.

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ToyEncoder encoder;
  std::uint64_t seed = 0;
  long update_counter = 0;
  nlohmann::json meta;
};

inline void save_checkpoint(const std::string& path, const ToyEncoder& enc,
                            long update_counter, const nlohmann::json& meta = {}) {
  nlohmann::ordered_json header;
  header["config"] = enc.config().to_json();
  header["seed"] = enc.seed();
  header["update_counter"] = update_counter;
  header["meta"] = meta.is_null() ? nlohmann::json::object() : meta;
  nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
  for (const auto& t : enc.parameters())
    tensors.push_back({{"name", t.name},
                       {"rows", t.value.rows()},
                       {"cols", t.value.cols()},
                       {"scope", t.encoder_scope ? "encoder" : "head"}});
  header["tensors"] = std::move(tensors);
  const std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out.write("EDCK", 4);
  const std::uint32_t version = kCheckpointVersion;
  out.write(reinterpret_cast<const char*>(&version), 4);
  const std::uint64_t hlen = hs.size();
  out.write(reinterpret_cast<const char*>(&hlen), 8);
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const auto& t : enc.parameters())
    out.write(reinterpret_cast<const char*>(t.value.data()),
              static_cast<std::streamsize>(t.value.size() * sizeof(double)));
  if (!out) throw IoError("write failed: " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "EDCK", 4) != 0)
    throw ParseError(path + ": bad magic (want EDCK)");
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != kCheckpointVersion)
    throw ParseError(path + ": unsupported checkpoint version " + std::to_string(version));
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), 8);
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw ParseError(path + ": truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": bad header: " + e.what());
  }

  Checkpoint ck;
  ck.seed = header.at("seed").get<std::uint64_t>();
  ck.update_counter = header.at("update_counter").get<long>();
  ck.meta = header.value("meta", nlohmann::json::object());
  ck.encoder.init(EncoderConfig::from_json(header.at("config")), ck.seed);

  for (const auto& tj : header.at("tensors")) {
    Tensor& t = ck.encoder.param(tj.at("name").get<std::string>());
    const long rows = tj.at("rows").get<long>();
    const long cols = tj.at("cols").get<long>();
    if (rows != t.value.rows() || cols != t.value.cols())
      throw ParseError(path + ": tensor shape mismatch for " + t.name);
    in.read(reinterpret_cast<char*>(t.value.data()),
            static_cast<std::streamsize>(rows * cols * sizeof(double)));
  }
  if (!in) throw ParseError(path + ": truncated tensor data");
  return ck;
}

// ---------------------------------------------------------------------------
// adapter contract for external pretrained encoders

/// Inference-side encoder surface: waveform in, per-frame logits over the
/// emotion-dependent vocabulary out.
class EncoderAdapter {
 public:
  virtual ~EncoderAdapter() = default;
  virtual Matrix logits(const Waveform& w) const = 0;
  virtual FrameGeometry geometry() const = 0;
  virtual std::string backend() const = 0;
};

class ToyEncoderAdapter final : public EncoderAdapter {
 public:
  explicit ToyEncoderAdapter(ToyEncoder enc) : enc_(std::move(enc)) {}
  Matrix logits(const Waveform& w) const override { return enc_.encode(w); }
  FrameGeometry geometry() const override { return enc_.config().frames; }
  std::string backend() const override { return "toy"; }
  const ToyEncoder& encoder() const { return enc_; }

 private:
  ToyEncoder enc_;
};

using AdapterFactory =
    std::function<std::unique_ptr<EncoderAdapter>(const nlohmann::json& descriptor)>;

inline std::map<std::string, AdapterFactory>& adapter_registry() {
  static std::map<std::string, AdapterFactory> reg = {
      {"toy", [](const nlohmann::json& d) -> std::unique_ptr<EncoderAdapter> {
         if (d.contains("checkpoint"))
           return std::make_unique<ToyEncoderAdapter>(
               load_checkpoint(d.at("checkpoint").get<std::string>()).encoder);
         EncoderConfig cfg;
         cfg.vocab_size = d.at("vocab_size").get<int>();
         return std::make_unique<ToyEncoderAdapter>(
             ToyEncoder(cfg, d.value("seed", std::uint64_t{1})));
       }}};
  return reg;
}

/// Resolves an adapter descriptor {"backend": name, ...}. Backends other
/// than the built-in toy encoder are optional plug-ins; asking for an
/// unregistered one is a capability error, not a crash.
inline std::unique_ptr<EncoderAdapter> load_pretrained_adapter(const nlohmann::json& descriptor) {
  const std::string backend = descriptor.value("backend", "");
  if (backend.empty())
    throw ValidationError("adapter descriptor needs a 'backend' field");
  auto& reg = adapter_registry();
  auto it = reg.find(backend);
  if (it == reg.end())
    throw CapabilityError("encoder backend '" + backend +
                          "' is not available in this build");
  return it->second(descriptor);
}

}  // namespace edsr

#endif  // EDSR_ACOUSTIC_HPP
