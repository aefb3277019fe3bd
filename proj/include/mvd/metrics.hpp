#pragma once

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mvd/error.hpp"
#include "mvd/model.hpp"
#include "mvd/subword.hpp"
#include "mvd/types.hpp"
#include "mvd/views.hpp"

namespace mvd {

// Ties go to the lowest index.
inline ClassIndex argmax(std::span<const double> v) {
  return static_cast<ClassIndex>(std::max_element(v.begin(), v.end()) - v.begin());
}

struct Prediction {
  ClassIndex label = 0;
  std::vector<double> avg_logits;
};

inline Prediction average_views(const std::vector<std::vector<double>>& per_view) {
  if (per_view.empty()) throw Error(ErrorCode::EmptyInput, "no view logits");
  Prediction p;
  p.avg_logits.assign(per_view.front().size(), 0.0);
  for (const auto& v : per_view) {
    if (v.size() != p.avg_logits.size()) throw Error(ErrorCode::DimMismatch, "view logits differ in size");
    for (std::size_t c = 0; c < v.size(); ++c) p.avg_logits[c] += v[c];
  }
  for (auto& x : p.avg_logits) x /= static_cast<double>(per_view.size());
  p.label = argmax(p.avg_logits);
  return p;
}

// Mean of the original, delex and mixed view logits.
inline Prediction ensemble_predict(const ModelParams& params, const ViewSet& views, const Vocab& vocab,
                                   std::size_t max_len) {
  return average_views({forward(params, encode(vocab, views.original, max_len)),
                        forward(params, encode(vocab, views.delex, max_len)),
                        forward(params, encode(vocab, views.mixed, max_len))});
}

inline Prediction predict_code(const ModelParams& params, std::string_view code, const LanguageProfile& profile,
                               const Vocab& vocab, std::size_t max_len) {
  Rng unused = make_rng(0);
  return ensemble_predict(params, make_views(code, profile, ViewMode::Infer, unused), vocab, max_len);
}

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  std::optional<double> auc;
  std::vector<ClassScores> per_class;
  std::vector<std::vector<std::size_t>> confusion;  // [gold][pred]
};

inline MetricsReport compute_metrics(std::span<const ClassIndex> pred, std::span<const ClassIndex> gold,
                                     std::size_t k) {
  if (pred.size() != gold.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(pred.size()) + " predictions vs " +
                                               std::to_string(gold.size()) + " gold labels");
  if (gold.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
  MetricsReport r;
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] >= k || pred[i] >= k) throw Error(ErrorCode::BadLabel, "label out of range at sample " + std::to_string(i));
    ++r.confusion[gold[i]][pred[i]];
  }
  std::size_t correct = 0;
  for (std::size_t c = 0; c < k; ++c) correct += r.confusion[c][c];
  const double n = static_cast<double>(gold.size());
  r.accuracy = static_cast<double>(correct) / n;
  r.per_class.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t tp = r.confusion[c][c], predicted = 0, support = 0;
    for (std::size_t j = 0; j < k; ++j) {
      predicted += r.confusion[j][c];
      support += r.confusion[c][j];
    }
    auto& s = r.per_class[c];
    s.support = support;
    s.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    s.recall = support ? static_cast<double>(tp) / static_cast<double>(support) : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    r.macro_f1 += s.f1;
    r.weighted_f1 += s.f1 * static_cast<double>(support);
  }
  r.macro_f1 /= static_cast<double>(k);
  r.weighted_f1 /= n;
  return r;
}

// Probability that a random positive outscores a random negative, ties 1/2,
// via average ranks.
inline double auc(std::span<const double> scores, std::span<const int> gold) {
  if (scores.size() != gold.size()) throw Error(ErrorCode::LengthMismatch, "scores and labels differ in length");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (gold[idx[t]] == 1) {
        pos_rank_sum += avg_rank;
        ++pos;
      } else if (gold[idx[t]] == 0) {
        ++neg;
      } else {
        throw Error(ErrorCode::BadLabel, "binary labels must be 0 or 1");
      }
    }
    i = j;
  }
  if (pos == 0 || neg == 0) throw Error(ErrorCode::OneClassOnly, "AUC needs both classes");
  const double p = static_cast<double>(pos), q = static_cast<double>(neg);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

// Metrics of the constant predictor that always emits the modal gold class.
inline MetricsReport majority_baseline(std::span<const ClassIndex> gold, std::size_t k) {
  if (gold.empty()) throw Error(ErrorCode::EmptyInput, "no gold labels");
  std::vector<std::size_t> counts(k, 0);
  for (auto g : gold) {
    if (g >= k) throw Error(ErrorCode::BadLabel, "gold label out of range");
    ++counts[g];
  }
  const ClassIndex mode = static_cast<ClassIndex>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  std::vector<ClassIndex> pred(gold.size(), mode);
  return compute_metrics(pred, gold, k);
}

inline nlohmann::json to_json(const MetricsReport& r, const std::vector<std::string>& names) {
  nlohmann::json j;
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  j["weighted_f1"] = r.weighted_f1;
  j["auc"] = r.auc ? nlohmann::json(*r.auc) : nlohmann::json(nullptr);
  auto& pc = j["per_class"] = nlohmann::json::array();
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const auto& s = r.per_class[c];
    pc.push_back({{"class", c < names.size() ? names[c] : std::to_string(c)},
                  {"precision", s.precision},
                  {"recall", s.recall},
                  {"f1", s.f1},
                  {"support", s.support}});
  }
  j["confusion"] = r.confusion;
  return j;
}

inline std::string to_text(const MetricsReport& r, const std::vector<std::string>& names) {
  std::ostringstream o;
  char buf[160];
  std::snprintf(buf, sizeof buf, "accuracy     %.4f\nmacro_f1     %.4f\nweighted_f1  %.4f\n", r.accuracy,
                r.macro_f1, r.weighted_f1);
  o << buf;
  if (r.auc) {
    std::snprintf(buf, sizeof buf, "auc          %.4f\n", *r.auc);
    o << buf;
  }
  o << "\nclass            precision  recall     f1         support\n";
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const auto& s = r.per_class[c];
    std::snprintf(buf, sizeof buf, "%-16s %-10.4f %-10.4f %-10.4f %zu\n",
                  (c < names.size() ? names[c] : std::to_string(c)).c_str(), s.precision, s.recall, s.f1, s.support);
    o << buf;
  }
  o << "\nconfusion (rows gold, cols pred)\n";
  for (const auto& row : r.confusion) {
    for (std::size_t c = 0; c < row.size(); ++c) o << (c ? " " : "") << row[c];
    o << '\n';
  }
  return o.str();
}

}  // namespace mvd
