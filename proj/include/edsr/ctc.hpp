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
#ifndef EDSR_CTC_HPP
#define EDSR_CTC_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "edsr/common.hpp"

namespace edsr {

using Matrix = Eigen::MatrixXd;  // frames x vocabulary

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();
inline constexpr int kBlankId = 0;

inline double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

/// Rowwise log-softmax. Every output row log-sum-exps to zero.
inline Matrix log_softmax(const Matrix& logits) {
  if (logits.rows() < 1 || logits.cols() < 2)
    throw ValidationError("logit matrix must be at least 1 x 2");
  if (!logits.allFinite())
    throw ValidationError("logit matrix contains non-finite entries");
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    const double lse = m + std::log((logits.row(t).array() - m).exp().sum());
    out.row(t) = logits.row(t).array() - lse;
  }
  return out;
}

/// Frames needed to emit the target: its length plus one separating blank
/// per adjacent repeat.
inline long ctc_min_frames(const std::vector<int>& target) {
  long required = static_cast<long>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++required;
  return required;
}

inline bool ctc_feasible(long frames, const std::vector<int>& target) {
  return frames >= ctc_min_frames(target);
}

namespace detail {

inline void ctc_check_args(const Matrix& logpost, const std::vector<int>& target) {
  if (target.empty()) throw ValidationError("CTC target must be nonempty");
  for (int id : target)
    if (id <= 0 || id >= logpost.cols())
      throw ValidationError("CTC target id out of range: " + std::to_string(id));
  if (!ctc_feasible(logpost.rows(), target))
    throw InfeasibleTargetError(
        "target needs " + std::to_string(ctc_min_frames(target)) +
        " frames but only " + std::to_string(logpost.rows()) + " are available");
}

// extended label sequence: blank, l1, blank, l2, ..., blank
inline int ext_label(const std::vector<int>& target, int s) {
  return (s % 2 == 0) ? kBlankId : target[static_cast<std::size_t>(s / 2)];
}

inline Matrix ctc_alpha(const Matrix& P, const std::vector<int>& target) {
  const int T = static_cast<int>(P.rows());
  const int S = 2 * static_cast<int>(target.size()) + 1;
  Matrix alpha = Matrix::Constant(T, S, kLogZero);
  alpha(0, 0) = P(0, kBlankId);
  if (S > 1) alpha(0, 1) = P(0, ext_label(target, 1));
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      double a = alpha(t - 1, s);
      if (s >= 1) a = log_add(a, alpha(t - 1, s - 1));
      const int lab = ext_label(target, s);
      if (s >= 2 && lab != kBlankId && lab != ext_label(target, s - 2))
        a = log_add(a, alpha(t - 1, s - 2));
      alpha(t, s) = (a == kLogZero) ? kLogZero : a + P(t, lab);
    }
  }
  return alpha;
}

inline Matrix ctc_beta(const Matrix& P, const std::vector<int>& target) {
  const int T = static_cast<int>(P.rows());
  const int S = 2 * static_cast<int>(target.size()) + 1;
  Matrix beta = Matrix::Constant(T, S, kLogZero);
  beta(T - 1, S - 1) = P(T - 1, kBlankId);
  if (S > 1) beta(T - 1, S - 2) = P(T - 1, ext_label(target, S - 2));
  for (int t = T - 2; t >= 0; --t) {
    for (int s = S - 1; s >= 0; --s) {
      double b = beta(t + 1, s);
      if (s + 1 < S) b = log_add(b, beta(t + 1, s + 1));
      const int lab = ext_label(target, s);
      if (s + 2 < S && lab != kBlankId && ext_label(target, s + 2) != lab)
        b = log_add(b, beta(t + 1, s + 2));
      beta(t, s) = (b == kLogZero) ? kLogZero : b + P(t, lab);
    }
  }
  return beta;
}

}  // namespace detail

/// -log P(target | logpost), summing over every blank-augmented alignment
/// path, computed with the log-space forward algorithm. Targets that cannot
/// fit in the available frames raise InfeasibleTargetError.
inline double ctc_loss(const Matrix& logpost, const std::vector<int>& target) {
  detail::ctc_check_args(logpost, target);
  const Matrix alpha = detail::ctc_alpha(logpost, target);
  const int T = static_cast<int>(logpost.rows());
  const int S = 2 * static_cast<int>(target.size()) + 1;
  double logp = alpha(T - 1, S - 1);
  if (S > 1) logp = log_add(logp, alpha(T - 1, S - 2));
  if (logp == kLogZero)
    throw InfeasibleTargetError("target has zero path mass");
  return -logp;
}

struct CtcResult {
  double loss = 0.0;
  Matrix grad_logits;  // d loss / d logits, where logpost = log_softmax(logits)
};

/// Loss plus the exact gradient with respect to the logits that produced
/// the log-posteriorgram: dL/du[t][k] = y[t][k] - q[t][k], with q the
/// state-posterior mass of vocabulary entry k at frame t.
inline CtcResult ctc_loss_grad(const Matrix& logpost, const std::vector<int>& target) {
  detail::ctc_check_args(logpost, target);
  const int T = static_cast<int>(logpost.rows());
  const int V = static_cast<int>(logpost.cols());
  const int S = 2 * static_cast<int>(target.size()) + 1;

  const Matrix alpha = detail::ctc_alpha(logpost, target);
  const Matrix beta = detail::ctc_beta(logpost, target);

  double logz = alpha(T - 1, S - 1);
  if (S > 1) logz = log_add(logz, alpha(T - 1, S - 2));
  if (logz == kLogZero)
    throw InfeasibleTargetError("target has zero path mass");

  CtcResult res;
  res.loss = -logz;
  res.grad_logits.resize(T, V);
  Matrix lq = Matrix::Constant(T, V, kLogZero);
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      if (alpha(t, s) == kLogZero || beta(t, s) == kLogZero) continue;
      const int lab = detail::ext_label(target, s);
      // alpha and beta both include the emission at t; divide one out
      const double gamma = alpha(t, s) + beta(t, s) - logpost(t, lab);
      lq(t, lab) = log_add(lq(t, lab), gamma);
    }
    for (int k = 0; k < V; ++k) {
      const double q = (lq(t, k) == kLogZero) ? 0.0 : std::exp(lq(t, k) - logz);
      res.grad_logits(t, k) = std::exp(logpost(t, k)) - q;
    }
  }
  return res;
}

/// Merges adjacent repeats, then removes blanks.
inline std::vector<int> collapse_path(const std::vector<int>& path) {
  std::vector<int> out;
  int prev = -1;
  for (int id : path) {
    if (id != prev && id != kBlankId) out.push_back(id);
    prev = id;
  }
  return out;
}

/// Reference CTC by full path enumeration; the guard keeps V^T tractable.
/// Returns -log of the total probability of paths collapsing to the target.
inline double brute_force_ctc(const Matrix& logpost, const std::vector<int>& target) {
  const int T = static_cast<int>(logpost.rows());
  const int V = static_cast<int>(logpost.cols());
  if (std::pow(static_cast<double>(V), static_cast<double>(T)) > 1e6)
    throw ValidationError("brute-force guard exceeded: V^T > 1e6");

  double acc = kLogZero;
  std::vector<int> path(static_cast<std::size_t>(T), 0);
  while (true) {
    double lp = 0.0;
    for (int t = 0; t < T; ++t) lp += logpost(t, path[static_cast<std::size_t>(t)]);
    if (collapse_path(path) == target) acc = log_add(acc, lp);
    int t = T - 1;
    while (t >= 0 && ++path[static_cast<std::size_t>(t)] == V) path[static_cast<std::size_t>(t--)] = 0;
    if (t < 0) break;
  }
  if (acc == kLogZero)
    throw InfeasibleTargetError("brute force: no path collapses to the target");
  return -acc;
}

/// Probability of every collapsed output under full enumeration (linear
/// domain). Sums to one for a normalized input; test machinery.
inline std::map<std::vector<int>, double> brute_force_output_distribution(const Matrix& logpost) {
  const int T = static_cast<int>(logpost.rows());
  const int V = static_cast<int>(logpost.cols());
  if (std::pow(static_cast<double>(V), static_cast<double>(T)) > 1e6)
    throw ValidationError("brute-force guard exceeded: V^T > 1e6");
  std::map<std::vector<int>, double> dist;
  std::vector<int> path(static_cast<std::size_t>(T), 0);
  while (true) {
    double lp = 0.0;
    for (int t = 0; t < T; ++t) lp += logpost(t, path[static_cast<std::size_t>(t)]);
    dist[collapse_path(path)] += std::exp(lp);
    int t = T - 1;
    while (t >= 0 && ++path[static_cast<std::size_t>(t)] == V) path[static_cast<std::size_t>(t--)] = 0;
    if (t < 0) break;
  }
  return dist;
}

/// Best-path decoding: per-frame argmax (ties to the lowest index), collapse
/// adjacent repeats, drop blanks.
inline std::vector<int> greedy_decode(const Matrix& logpost) {
  std::vector<int> path(static_cast<std::size_t>(logpost.rows()));
  for (Eigen::Index t = 0; t < logpost.rows(); ++t) {
    int best = 0;
    for (Eigen::Index k = 1; k < logpost.cols(); ++k)
      if (logpost(t, k) > logpost(t, best)) best = static_cast<int>(k);
    path[static_cast<std::size_t>(t)] = best;
  }
  return collapse_path(path);
}

// ---------------------------------------------------------------------------
// posteriorgram container: magic "EDSR", u32 version, u32 T, u32 V, then
// T*V little-endian float32 log-probabilities, row-major.

inline constexpr std::uint32_t kPosteriorgramVersion = 1;

inline void write_posteriorgram(const std::string& path, const Matrix& logpost) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write posteriorgram: " + path);
  out.write("EDSR", 4);
  auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  put_u32(kPosteriorgramVersion);
  put_u32(static_cast<std::uint32_t>(logpost.rows()));
  put_u32(static_cast<std::uint32_t>(logpost.cols()));
  for (Eigen::Index t = 0; t < logpost.rows(); ++t)
    for (Eigen::Index k = 0; k < logpost.cols(); ++k) {
      const float f = static_cast<float>(logpost(t, k));
      out.write(reinterpret_cast<const char*>(&f), 4);
    }
  if (!out) throw IoError("write failed: " + path);
}

inline Matrix read_posteriorgram(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open posteriorgram: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "EDSR", 4) != 0)
    throw ParseError(path + ": bad magic (want EDSR)");
  auto get_u32 = [&]() {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  const std::uint32_t version = get_u32();
  if (version != kPosteriorgramVersion)
    throw ParseError(path + ": unsupported version " + std::to_string(version));
  const std::uint32_t T = get_u32();
  const std::uint32_t V = get_u32();
  if (!in || T < 1 || V < 2) throw ParseError(path + ": bad dimensions");
  Matrix m(T, V);
  for (std::uint32_t t = 0; t < T; ++t)
    for (std::uint32_t k = 0; k < V; ++k) {
      float f = 0.0f;
      in.read(reinterpret_cast<char*>(&f), 4);
      m(t, k) = static_cast<double>(f);
    }
  if (!in) throw ParseError(path + ": truncated data");
  return m;
}

}  // namespace edsr

#endif  // EDSR_CTC_HPP
