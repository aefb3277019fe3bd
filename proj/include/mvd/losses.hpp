#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvd/error.hpp"
#include "mvd/types.hpp"

namespace mvd {

// A probability vector produced by softmax.
struct Dist {
  std::vector<double> p;

  std::size_t size() const { return p.size(); }
  double operator[](std::size_t k) const { return p[k]; }
};

struct LossConfig {
  double label_smoothing = 0.1;
  double lambda = 0.5;
  std::optional<std::vector<double>> class_weights;

  void validate() const {
    if (!(label_smoothing >= 0.0 && label_smoothing < 1.0))
      throw Error(ErrorCode::BadArgument, "label_smoothing must be in [0, 1)");
    if (!(lambda >= 0.0)) throw Error(ErrorCode::BadArgument, "lambda must be >= 0");
    if (class_weights)
      for (double w : *class_weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::BadArgument, "class weights must be > 0");
  }
};

inline void check_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "non-finite logit");
}

// log p with the max subtracted first.
inline std::vector<double> log_softmax(std::span<const double> logits) {
  check_finite(logits);
  if (logits.empty()) throw Error(ErrorCode::DimMismatch, "empty logit vector");
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double x : logits) z += std::exp(x - m);
  const double lz = m + std::log(z);
  std::vector<double> out(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) out[k] = logits[k] - lz;
  return out;
}

inline Dist softmax(std::span<const double> logits) {
  auto lp = log_softmax(logits);
  Dist d;
  d.p.resize(lp.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < lp.size(); ++k) {
    d.p[k] = std::max(std::exp(lp[k]), std::numeric_limits<double>::min());
    sum += d.p[k];
  }
  for (auto& x : d.p) x /= sum;
  return d;
}

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

inline void check_label(ClassIndex label, std::size_t k) {
  if (label >= k)
    throw Error(ErrorCode::BadLabel, "label " + std::to_string(label) + " out of range for " +
                                         std::to_string(k) + " classes");
}

inline double class_weight(const LossConfig& cfg, ClassIndex label, std::size_t k) {
  if (!cfg.class_weights) return 1.0;
  if (cfg.class_weights->size() != k)
    throw Error(ErrorCode::DimMismatch, "class_weights has " + std::to_string(cfg.class_weights->size()) +
                                            " entries, expected " + std::to_string(k));
  return (*cfg.class_weights)[label];
}

// Label-smoothed, optionally class-weighted cross entropy; grad = w (p - t).
inline LossGrad cross_entropy(std::span<const double> logits, ClassIndex label, const LossConfig& cfg) {
  const std::size_t k = logits.size();
  check_label(label, k);
  const double w = class_weight(cfg, label, k);
  const double eps = cfg.label_smoothing;
  const auto lp = log_softmax(logits);
  LossGrad out;
  out.grad.resize(k);
  double loss = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double target = (c == label ? 1.0 - eps : 0.0) + eps / static_cast<double>(k);
    if (target != 0.0) loss -= target * lp[c];
    out.grad[c] = w * (std::exp(lp[c]) - target);
  }
  out.loss = w * loss;
  return out;
}

// 1/2 [KL(p||q) + KL(q||p)] = 1/2 sum (p - q)(ln p - ln q).
inline double sym_kl(const Dist& p, const Dist& q) {
  if (p.size() != q.size())
    throw Error(ErrorCode::DimMismatch, "distributions differ in size");
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += (p[k] - q[k]) * (std::log(p[k]) - std::log(q[k]));
  return 0.5 * s;
}

struct SymKlGrad {
  double value = 0.0;
  std::vector<double> grad_a;  // w.r.t. logits of the first distribution
  std::vector<double> grad_b;
};

// SymKL between softmax(a) and softmax(b), with gradients w.r.t. both logit vectors.
inline SymKlGrad sym_kl_logits(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimMismatch, "logit vectors differ in size");
  const auto la = log_softmax(a);
  const auto lb = log_softmax(b);
  const std::size_t k = a.size();
  std::vector<double> pa(k), pb(k), diff(k);
  SymKlGrad out;
  for (std::size_t c = 0; c < k; ++c) {
    pa[c] = std::exp(la[c]);
    pb[c] = std::exp(lb[c]);
    diff[c] = la[c] - lb[c];
    out.value += (pa[c] - pb[c]) * diff[c];
  }
  out.value *= 0.5;
  // dS/dp_c = 1/2 [(ln p_c - ln q_c) + (p_c - q_c)/p_c] = 1/2 [diff + 1 - q/p]
  // through softmax: dS/da_j = p_j (g_j - sum_c p_c g_c). The constant term
  // cancels, leaving g_c = 1/2 (diff_c - q_c/p_c), and sum_c p_c (q_c/p_c) = 1.
  auto chain = [&](const std::vector<double>& p, const std::vector<double>& q, double sign) {
    std::vector<double> g(k);
    double dot = 0.0;
    for (std::size_t c = 0; c < k; ++c) dot += p[c] * sign * diff[c];
    for (std::size_t c = 0; c < k; ++c)
      g[c] = 0.5 * (p[c] * (sign * diff[c] - dot) - (q[c] - p[c]));
    return g;
  };
  out.grad_a = chain(pa, pb, 1.0);
  out.grad_b = chain(pb, pa, -1.0);
  return out;
}

struct MultiViewLoss {
  double loss = 0.0;
  double ce = 0.0;
  double kl_delex = 0.0;
  double kl_mixed = 0.0;
  std::vector<double> grad_original;
  std::vector<double> grad_delex;
  std::vector<double> grad_mixed;
};

// CE(original) + lambda SymKL(orig, delex) + lambda/2 SymKL(orig, mixed).
// KL gradients flow into all three views.
inline MultiViewLoss multiview_loss(std::span<const double> logits_orig, std::span<const double> logits_delex,
                                    std::span<const double> logits_mixed, ClassIndex label,
                                    const LossConfig& cfg) {
  if (logits_delex.size() != logits_orig.size() || logits_mixed.size() != logits_orig.size())
    throw Error(ErrorCode::DimMismatch, "view logits differ in size");
  auto ce = cross_entropy(logits_orig, label, cfg);
  const auto kd = sym_kl_logits(logits_orig, logits_delex);
  const auto km = sym_kl_logits(logits_orig, logits_mixed);
  const double lam = cfg.lambda;
  const std::size_t k = logits_orig.size();

  MultiViewLoss out;
  out.ce = ce.loss;
  out.kl_delex = kd.value;
  out.kl_mixed = km.value;
  out.loss = ce.loss + lam * kd.value + 0.5 * lam * km.value;
  out.grad_original = std::move(ce.grad);
  out.grad_delex.resize(k);
  out.grad_mixed.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    out.grad_original[c] += lam * kd.grad_a[c] + 0.5 * lam * km.grad_a[c];
    out.grad_delex[c] = lam * kd.grad_b[c];
    out.grad_mixed[c] = 0.5 * lam * km.grad_b[c];
  }
  return out;
}

// w[c] = N / (K n_c); N defaults to the sum of counts.
inline std::vector<double> inverse_freq_weights(std::span<const std::size_t> counts, std::optional<double> total = {}) {
  if (counts.empty()) throw Error(ErrorCode::ZeroCount, "no classes");
  double n = 0.0;
  for (auto c : counts) {
    if (c == 0) throw Error(ErrorCode::ZeroCount, "class with zero samples");
    n += static_cast<double>(c);
  }
  if (total) {
    if (!(*total > 0.0)) throw Error(ErrorCode::BadConfig, "total must be > 0");
    n = *total;
  }
  const double k = static_cast<double>(counts.size());
  std::vector<double> w;
  w.reserve(counts.size());
  for (auto c : counts) w.push_back(n / (k * static_cast<double>(c)));
  return w;
}

}  // namespace mvd
