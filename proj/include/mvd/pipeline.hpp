#pragma once

// Glue used by the CLI and the end-to-end tests: model bundles, tokenizer
// corpora and batch prediction.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mvd/data.hpp"
#include "mvd/metrics.hpp"
#include "mvd/model.hpp"
#include "mvd/subword.hpp"
#include "mvd/train.hpp"
#include "mvd/views.hpp"

namespace mvd {

struct ModelBundle {
  ModelParams params;
  Vocab vocab;
  TrainConfig config;
};

inline void save_bundle(const std::string& dir, const ModelBundle& b) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  save_params(b.params, (root / "params.bin").string());
  b.vocab.save((root / "vocab.txt").string());
  std::ofstream cfg(root / "config", std::ios::binary);
  if (!cfg) throw Error(ErrorCode::Io, "cannot write " + (root / "config").string());
  cfg << config_text(b.config);
}

inline ModelBundle load_bundle(const std::string& dir) {
  const std::filesystem::path root(dir);
  ModelBundle b{load_params((root / "params.bin").string()), Vocab::load((root / "vocab.txt").string()),
                load_config((root / "config").string(), TrainConfig{})};
  if (b.params.dims.vocab != b.vocab.size())
    throw Error(ErrorCode::BadFormat, dir + ": params expect " + std::to_string(b.params.dims.vocab) +
                                          " tokens, vocab has " + std::to_string(b.vocab.size()));
  if (b.params.dims.classes != num_classes(b.config.task))
    throw Error(ErrorCode::BadFormat, dir + ": class count does not match task");
  return b;
}

// Tokenizer training text: the inference views of every snippet plus the
// augmentation sentences, so prefix tags, placeholders and prose all appear.
inline std::vector<std::string> bpe_corpus(const std::vector<RawRecord>& records) {
  std::vector<std::string> corpus;
  corpus.reserve(records.size() * 2 + fragment_pool().size());
  Rng unused = make_rng(0);
  for (const auto& r : records) {
    auto v = make_views(r.code, profile_for(r.language.value_or(Language::Unknown)), ViewMode::Infer, unused);
    corpus.push_back(std::move(v.original));
    corpus.push_back(std::move(v.delex));
  }
  for (auto s : fragment_pool()) corpus.emplace_back(s);
  return corpus;
}

inline std::vector<RawRecord> as_records(const std::vector<CodeSnippet>& data) {
  std::vector<RawRecord> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back(RawRecord{s.id, s.code, s.language, s.label_name});
  return out;
}

inline std::vector<Prediction> predict_all(const ModelParams& params, const Vocab& vocab,
                                           const std::vector<RawRecord>& records, std::size_t max_len) {
  std::vector<Prediction> out;
  out.reserve(records.size());
  for (const auto& r : records)
    out.push_back(predict_code(params, r.code, profile_for(r.language.value_or(Language::Unknown)), vocab, max_len));
  return out;
}

// Ensemble predictions scored against gold labels; AUC for the binary task
// uses the averaged machine-class logit.
inline MetricsReport evaluate_model(const ModelParams& params, const Vocab& vocab,
                                    const std::vector<CodeSnippet>& data, Task task, std::size_t max_len) {
  const auto preds = predict_all(params, vocab, as_records(data), max_len);
  std::vector<ClassIndex> pred, gold;
  std::vector<double> scores;
  std::vector<int> binary;
  for (std::size_t i = 0; i < data.size(); ++i) {
    pred.push_back(preds[i].label);
    gold.push_back(data[i].label);
    if (task == Task::A) {
      scores.push_back(preds[i].avg_logits[1]);
      binary.push_back(static_cast<int>(data[i].label));
    }
  }
  MetricsReport report = compute_metrics(pred, gold, num_classes(task));
  if (task == Task::A && report.per_class[0].support > 0 && report.per_class[1].support > 0)
    report.auc = auc(scores, binary);
  return report;
}

}  // namespace mvd
