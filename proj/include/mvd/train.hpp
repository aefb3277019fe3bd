#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mvd/data.hpp"
#include "mvd/error.hpp"
#include "mvd/losses.hpp"
#include "mvd/model.hpp"
#include "mvd/rng.hpp"
#include "mvd/subword.hpp"
#include "mvd/views.hpp"

namespace mvd {

struct TrainConfig {
  Task task = Task::A;
  double learning_rate = 2e-5;
  std::size_t batch_size = 16;
  std::size_t epochs = 1;
  std::size_t warmup_steps = 470;
  double weight_decay = 0.01;
  std::size_t max_len = 512;
  double lambda = 0.5;
  double dropout_rate = 0.15;
  double label_smoothing = 0.1;
  bool class_weighting = false;
  std::uint64_t seed = 42;
  // Probability of mixed-content injection in the mixed view.
  double augment_probability = 0.4;
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 128;
  std::size_t vocab_size = 8000;

  static TrainConfig task_a() { return TrainConfig{}; }

  static TrainConfig task_b() {
    TrainConfig c;
    c.task = Task::B;
    c.batch_size = 32;
    c.epochs = 3;
    c.warmup_steps = 500;
    c.lambda = 0.0;
    c.dropout_rate = 0.0;
    c.label_smoothing = 0.0;
    c.class_weighting = true;
    c.augment_probability = 0.0;
    return c;
  }

  static TrainConfig defaults(Task t) { return t == Task::A ? task_a() : task_b(); }

  LossConfig loss_config() const {
    LossConfig lc;
    lc.label_smoothing = label_smoothing;
    lc.lambda = lambda;
    return lc;
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::BadConfig, m); };
    if (!(learning_rate >= 0.0)) fail("learning_rate must be >= 0");
    if (batch_size < 1) fail("batch_size must be >= 1");
    if (!(weight_decay >= 0.0)) fail("weight_decay must be >= 0");
    if (max_len < 2) fail("max_len must be >= 2");
    if (!(lambda >= 0.0)) fail("lambda must be >= 0");
    if (!(dropout_rate >= 0.0 && dropout_rate <= 1.0)) fail("dropout_rate must be in [0, 1]");
    if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) fail("label_smoothing must be in [0, 1)");
    if (!(augment_probability >= 0.0 && augment_probability <= 1.0)) fail("augment_probability must be in [0, 1]");
    if (embed_dim < 1 || hidden_dim < 1) fail("model dimensions must be >= 1");
  }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Table-3 hyperparameters fine-tune a pretrained encoder; the small encoder
// here starts from random weights. Same column, with the step size raised to
// `learning_rate` and the warmup shrunk to a tenth of the run when it would
// not fit.
inline TrainConfig desk_scaled(TrainConfig cfg, std::size_t n_train, double learning_rate = 3e-3) {
  const std::size_t steps_per_epoch = (n_train + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total = steps_per_epoch * cfg.epochs;
  cfg.learning_rate = learning_rate;
  cfg.warmup_steps = std::min(cfg.warmup_steps, total / 10);
  return cfg;
}

namespace detail {

inline std::string trim_copy(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::BadConfig, "expected on/off, got '" + v + "'");
}

}  // namespace detail

// Applies one `key=value` pair. Keys are the TrainConfig field names.
inline void set_config_value(TrainConfig& c, const std::string& key, const std::string& value) {
  try {
    if (key == "task") c.task = parse_task(value);
    else if (key == "learning_rate") c.learning_rate = std::stod(value);
    else if (key == "batch_size") c.batch_size = std::stoul(value);
    else if (key == "epochs") c.epochs = std::stoul(value);
    else if (key == "warmup_steps") c.warmup_steps = std::stoul(value);
    else if (key == "weight_decay") c.weight_decay = std::stod(value);
    else if (key == "max_len") c.max_len = std::stoul(value);
    else if (key == "lambda") c.lambda = std::stod(value);
    else if (key == "dropout_rate") c.dropout_rate = std::stod(value);
    else if (key == "label_smoothing") c.label_smoothing = std::stod(value);
    else if (key == "class_weighting") c.class_weighting = detail::parse_bool(value);
    else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "augment_probability") c.augment_probability = std::stod(value);
    else if (key == "embed_dim") c.embed_dim = std::stoul(value);
    else if (key == "hidden_dim") c.hidden_dim = std::stoul(value);
    else if (key == "vocab_size") c.vocab_size = std::stoul(value);
    else throw Error(ErrorCode::BadConfig, "unknown config key '" + key + "'");
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::BadConfig, "bad value for " + key + ": '" + value + "'");
  }
}

// Flat key=value text; '#' starts a comment line.
inline TrainConfig parse_config(std::istream& in, TrainConfig base) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim_copy(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::BadConfig, "expected key=value", lineno);
    set_config_value(base, detail::trim_copy(line.substr(0, eq)), detail::trim_copy(line.substr(eq + 1)));
  }
  return base;
}

inline TrainConfig load_config(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return parse_config(in, std::move(base));
}

inline std::string config_text(const TrainConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "task=" << task_name(c.task) << '\n'
    << "learning_rate=" << c.learning_rate << '\n'
    << "batch_size=" << c.batch_size << '\n'
    << "epochs=" << c.epochs << '\n'
    << "warmup_steps=" << c.warmup_steps << '\n'
    << "weight_decay=" << c.weight_decay << '\n'
    << "max_len=" << c.max_len << '\n'
    << "lambda=" << c.lambda << '\n'
    << "dropout_rate=" << c.dropout_rate << '\n'
    << "label_smoothing=" << c.label_smoothing << '\n'
    << "class_weighting=" << (c.class_weighting ? "on" : "off") << '\n'
    << "seed=" << c.seed << '\n'
    << "augment_probability=" << c.augment_probability << '\n'
    << "embed_dim=" << c.embed_dim << '\n'
    << "hidden_dim=" << c.hidden_dim << '\n'
    << "vocab_size=" << c.vocab_size << '\n';
  return o.str();
}

// Linear 0 -> learning_rate over the warmup, then linear down to 0 at total_steps.
inline double lr_schedule(std::size_t step, const TrainConfig& cfg, std::size_t total_steps) {
  if (total_steps < cfg.warmup_steps)
    throw Error(ErrorCode::BadSchedule, "total_steps " + std::to_string(total_steps) + " < warmup_steps " +
                                            std::to_string(cfg.warmup_steps));
  const double base = cfg.learning_rate;
  if (step < cfg.warmup_steps)
    return base * static_cast<double>(step) / static_cast<double>(cfg.warmup_steps);
  if (step >= total_steps) return 0.0;
  return base * static_cast<double>(total_steps - step) / static_cast<double>(total_steps - cfg.warmup_steps);
}

struct OptimizerState {
  Gradients first;
  Gradients second;
  std::size_t step = 0;

  static OptimizerState for_params(const ModelParams& p) {
    return OptimizerState{zero_gradients(p), zero_gradients(p), 0};
  }
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

// Bias-corrected adaptive-moment update, then p <- p - lr * weight_decay * p.
inline void optimizer_step(ModelParams& params, OptimizerState& state, const Gradients& grads, double lr,
                           double weight_decay) {
  if (!grads.same_shape(params) || !state.first.same_shape(params) || !state.second.same_shape(params))
    throw Error(ErrorCode::ShapeMismatch, "optimizer state, gradients and params differ in shape");
  ++state.step;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = state.first.tensors();
  auto v = state.second.tensors();
  for (std::size_t t = 0; t < p.size(); ++t) {
    for (std::size_t k = 0; k < p[t].size(); ++k) {
      const double gk = g[t][k];
      m[t][k] = kAdamBeta1 * m[t][k] + (1.0 - kAdamBeta1) * gk;
      v[t][k] = kAdamBeta2 * v[t][k] + (1.0 - kAdamBeta2) * gk * gk;
      const double mhat = m[t][k] / bc1;
      const double vhat = v[t][k] / bc2;
      p[t][k] -= lr * mhat / (std::sqrt(vhat) + kAdamEps);
      p[t][k] -= lr * weight_decay * p[t][k];
    }
  }
}

inline void optimizer_step(ModelParams& params, OptimizerState& state, const Gradients& grads, double lr,
                           const TrainConfig& cfg) {
  optimizer_step(params, state, grads, lr, cfg.weight_decay);
}

struct StepLog {
  std::size_t step = 0;
  double lr = 0.0;
  double loss = 0.0;
  double ce = 0.0;
  double kl_delex = 0.0;
  double kl_mixed = 0.0;

  friend bool operator==(const StepLog&, const StepLog&) = default;
};

inline std::string log_csv(const std::vector<StepLog>& log) {
  std::ostringstream o;
  o.precision(10);
  o << "step,lr,loss,ce,kl_delex,kl_mixed\n";
  for (const auto& s : log)
    o << s.step << ',' << s.lr << ',' << s.loss << ',' << s.ce << ',' << s.kl_delex << ',' << s.kl_mixed << '\n';
  return o.str();
}

struct FitResult {
  ModelParams params;
  std::vector<StepLog> log;
};

// Sample order for one epoch.
inline std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed, epoch, 1);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

inline std::size_t total_steps(std::size_t n, const TrainConfig& cfg) {
  return cfg.epochs * ((n + cfg.batch_size - 1) / cfg.batch_size);
}

// Inverse-frequency weights over the classes present; absent classes get 1
// (they never occur as a target).
inline std::vector<double> training_class_weights(const std::vector<CodeSnippet>& data, std::size_t k) {
  const auto counts = class_counts(data, k);
  std::vector<std::size_t> present;
  for (auto c : counts)
    if (c > 0) present.push_back(c);
  const auto w = inverse_freq_weights(present);
  const double scale = static_cast<double>(present.size()) / static_cast<double>(k);
  std::vector<double> out(k, 1.0);
  for (std::size_t c = 0, j = 0; c < k; ++c)
    if (counts[c] > 0) out[c] = w[j++] * scale;
  return out;
}

using EpochHook = std::function<void(std::size_t epoch, const ModelParams&)>;

inline FitResult fit(const std::vector<CodeSnippet>& dataset, const TrainConfig& cfg, const Vocab& vocab,
                     const EpochHook& on_epoch = {}) {
  cfg.validate();
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "training set is empty");
  const std::size_t k = num_classes(cfg.task);
  for (const auto& s : dataset)
    if (s.label >= k)
      throw Error(ErrorCode::LabelOutOfRange, "snippet " + s.id + " has label " + std::to_string(s.label));

  LossConfig loss_cfg = cfg.loss_config();
  if (cfg.class_weighting) loss_cfg.class_weights = training_class_weights(dataset, k);

  const std::size_t steps = total_steps(dataset.size(), cfg);
  lr_schedule(0, cfg, steps);  // rejects warmup longer than the run

  FitResult result;
  result.params = init_params(ModelDims{vocab.size(), cfg.embed_dim, cfg.hidden_dim, k}, cfg.seed);
  OptimizerState opt = OptimizerState::for_params(result.params);
  const auto specials = vocab.special_set();
  const TokenId mask = vocab.specials().mask;
  Gradients grads = zero_gradients(result.params);

  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = epoch_order(dataset.size(), cfg.seed, epoch);
    Rng aug_rng = make_rng(cfg.seed, epoch, 2);
    Rng drop_rng = make_rng(cfg.seed, epoch, 3);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      for (auto t : grads.tensors()) std::fill(t.begin(), t.end(), 0.0);
      StepLog rec;
      for (std::size_t b = start; b < end; ++b) {
        const CodeSnippet& s = dataset[order[b]];
        const ViewSet views = make_views(s.code, s.profile(), ViewMode::Train, aug_rng, cfg.augment_probability);
        Encoding orig = encode(vocab, views.original, cfg.max_len);
        if (cfg.dropout_rate > 0.0) orig.ids = token_dropout(orig.ids, cfg.dropout_rate, mask, specials, drop_rng);
        const Encoding delex = encode(vocab, views.delex, cfg.max_len);
        const Encoding mixed = encode(vocab, views.mixed, cfg.max_len);
        const auto lo = forward(result.params, orig);
        const auto ld = forward(result.params, delex);
        const auto lm = forward(result.params, mixed);
        const auto mv = multiview_loss(lo, ld, lm, s.label, loss_cfg);
        accumulate_backward(result.params, orig, mv.grad_original, grads);
        if (cfg.lambda != 0.0) {
          accumulate_backward(result.params, delex, mv.grad_delex, grads);
          accumulate_backward(result.params, mixed, mv.grad_mixed, grads);
        }
        rec.loss += mv.loss;
        rec.ce += mv.ce;
        rec.kl_delex += mv.kl_delex;
        rec.kl_mixed += mv.kl_mixed;
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (auto t : grads.tensors())
        for (auto& x : t) x *= inv;
      rec.step = step;
      rec.lr = lr_schedule(step, cfg, steps);
      rec.loss *= inv;
      rec.ce *= inv;
      rec.kl_delex *= inv;
      rec.kl_mixed *= inv;
      optimizer_step(result.params, opt, grads, rec.lr, cfg);
      result.log.push_back(rec);
      ++step;
    }
    if (on_epoch) on_epoch(epoch, result.params);
  }
  return result;
}

}  // namespace mvd
