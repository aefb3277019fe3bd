#pragma once

// `mvd` command-line front end. run_cli never calls exit(), so tests drive it
// in-process with their own streams.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mvd/mvd.hpp"

namespace mvd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
  return f;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

struct PredRow {
  std::string label;
  std::vector<double> logits;
};

inline std::map<std::string, PredRow> read_predictions(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path);
  std::map<std::string, PredRow> rows;
  std::string line;
  for (std::size_t lineno = 1; std::getline(f, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const std::string id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
      rows[id] = PredRow{j.at("label").get<std::string>(), j.value("logits", std::vector<double>{})};
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, path + ": " + e.what(), lineno);
    }
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, path + " has no predictions");
  return rows;
}

inline std::string report(const MetricsReport& r, Task task, bool json) {
  return json ? to_json(r, label_names(task)).dump(2) + "\n" : to_text(r, label_names(task));
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Multi-view machine-generated code detection"};
  app.require_subcommand(1);

  auto task_check = CLI::IsMember({"a", "b", "A", "B"});

  // bpe-train
  std::string corpus_path, out_dir;
  std::size_t vocab_size = 8000;
  auto* bpe = app.add_subcommand("bpe-train", "Train a byte-level BPE vocabulary on a JSONL corpus");
  bpe->add_option("--corpus", corpus_path, "JSONL records")->required();
  bpe->add_option("--vocab-size", vocab_size, "Target vocabulary size")->capture_default_str();
  bpe->add_option("--out", out_dir, "Output directory (writes vocab.txt)")->required();

  // train
  std::string task_s, train_path, val_path, config_path, vocab_path;
  std::optional<std::size_t> max_len, warmup, epochs, batch, t_vocab_size, embed, hidden;
  std::optional<double> lambda, lr, dropout, smoothing, augment;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> class_weights;
  bool desk = false;
  auto* train = app.add_subcommand("train", "Train a classifier and write a model directory");
  train->add_option("--task", task_s)->required()->check(task_check);
  train->add_option("--train", train_path, "Training JSONL")->required();
  train->add_option("--val", val_path, "Validation JSONL");
  train->add_option("--config", config_path, "key=value config file");
  train->add_option("--out", out_dir, "Model directory")->required();
  train->add_option("--vocab", vocab_path, "Existing vocab.txt (otherwise trained on --train)");
  train->add_flag("--desk-scale", desk, "Raise the step size and shrink warmup for a from-scratch encoder");
  train->add_option("--max-len", max_len);
  train->add_option("--lambda", lambda);
  train->add_option("--warmup", warmup);
  train->add_option("--class-weights", class_weights)->check(CLI::IsMember({"on", "off"}));
  train->add_option("--seed", seed);
  train->add_option("--epochs", epochs);
  train->add_option("--batch-size", batch);
  train->add_option("--lr", lr);
  train->add_option("--dropout", dropout);
  train->add_option("--label-smoothing", smoothing);
  train->add_option("--augment", augment, "Mixed-view injection probability");
  train->add_option("--vocab-size", t_vocab_size);
  train->add_option("--embed-dim", embed);
  train->add_option("--hidden-dim", hidden);

  // predict
  std::string model_dir, input_path, output_path;
  auto* predict = app.add_subcommand("predict", "Ensemble predictions as JSONL");
  predict->add_option("--model", model_dir)->required();
  predict->add_option("--input", input_path)->required();
  predict->add_option("--output", output_path)->required();

  // evaluate
  std::string pred_path, gold_path;
  bool as_json = false;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold labels");
  evaluate->add_option("--pred", pred_path)->required();
  evaluate->add_option("--gold", gold_path)->required();
  evaluate->add_option("--task", task_s)->required()->check(task_check);
  evaluate->add_flag("--json", as_json);

  // views
  std::string language = "unknown", mode = "infer", keywords_path;
  std::uint64_t view_seed = 0;
  auto* views = app.add_subcommand("views", "Dump the prefix and the three input views");
  views->add_option("--input", input_path, "Source file")->required();
  views->add_option("--language", language)->capture_default_str();
  views->add_option("--mode", mode)->check(CLI::IsMember({"infer", "train"}))->capture_default_str();
  views->add_option("--seed", view_seed)->capture_default_str();
  views->add_option("--keywords", keywords_path, "Keyword file overriding the built-in table");

  // synth
  std::string counts_spec;
  double style_gap = 0.8;
  std::uint64_t synth_seed = 0;
  std::size_t min_st = 4, max_st = 10;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labelled corpus");
  synth->add_option("--task", task_s)->required()->check(task_check);
  synth->add_option("--out", output_path)->required();
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--style-gap", style_gap)->capture_default_str();
  synth->add_option("--counts", counts_spec, "Comma list or dist/DIVISOR");
  synth->add_option("--min-statements", min_st)->capture_default_str();
  synth->add_option("--max-statements", max_st)->capture_default_str();

  // baseline
  auto* baseline = app.add_subcommand("baseline", "Majority-class baseline on gold labels");
  baseline->add_option("--gold", gold_path)->required();
  baseline->add_option("--task", task_s)->required()->check(task_check);
  baseline->add_flag("--json", as_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (bpe->parsed()) {
      const auto vocab = train_bpe(bpe_corpus(read_records(corpus_path)), vocab_size);
      std::filesystem::create_directories(out_dir);
      vocab.save((std::filesystem::path(out_dir) / "vocab.txt").string());
      out << "vocab " << vocab.size() << " tokens, " << vocab.merges().size() << " merges\n";
    } else if (train->parsed()) {
      const Task task = parse_task(task_s);
      TrainConfig cfg = TrainConfig::defaults(task);
      if (!config_path.empty()) cfg = load_config(config_path, cfg);
      cfg.task = task;
      const auto data = load_dataset(train_path, task);
      if (desk) cfg = desk_scaled(cfg, data.size(), lr.value_or(3e-3));
      if (max_len) cfg.max_len = *max_len;
      if (lambda) cfg.lambda = *lambda;
      if (warmup) cfg.warmup_steps = *warmup;
      if (class_weights) cfg.class_weighting = *class_weights == "on";
      if (seed) cfg.seed = *seed;
      if (epochs) cfg.epochs = *epochs;
      if (batch) cfg.batch_size = *batch;
      if (lr) cfg.learning_rate = *lr;
      if (dropout) cfg.dropout_rate = *dropout;
      if (smoothing) cfg.label_smoothing = *smoothing;
      if (augment) cfg.augment_probability = *augment;
      if (t_vocab_size) cfg.vocab_size = *t_vocab_size;
      if (embed) cfg.embed_dim = *embed;
      if (hidden) cfg.hidden_dim = *hidden;
      cfg.validate();

      const Vocab vocab =
          vocab_path.empty() ? train_bpe(bpe_corpus(as_records(data)), cfg.vocab_size) : Vocab::load(vocab_path);
      const auto result = fit(data, cfg, vocab);
      save_bundle(out_dir, ModelBundle{result.params, vocab, cfg});
      detail::open_out((std::filesystem::path(out_dir) / "train_log.csv").string()) << log_csv(result.log);
      out << "trained " << result.log.size() << " steps on " << data.size() << " snippets\n";
      if (!val_path.empty()) {
        const auto val = load_dataset(val_path, task);
        const auto rep = evaluate_model(result.params, vocab, val, task, cfg.max_len);
        detail::open_out((std::filesystem::path(out_dir) / "val_metrics.json").string())
            << to_json(rep, label_names(task)).dump(2) << "\n";
        out << detail::report(rep, task, false);
      }
    } else if (predict->parsed()) {
      const auto bundle = load_bundle(model_dir);
      const auto records = read_records(input_path);
      const auto preds = predict_all(bundle.params, bundle.vocab, records, bundle.config.max_len);
      const auto& names = label_names(bundle.config.task);
      auto f = detail::open_out(output_path);
      for (std::size_t i = 0; i < records.size(); ++i) {
        nlohmann::json j;
        j["id"] = records[i].id;
        j["label"] = names[preds[i].label];
        j["logits"] = preds[i].avg_logits;
        f << j.dump() << "\n";
      }
      out << "wrote " << records.size() << " predictions\n";
    } else if (evaluate->parsed()) {
      const Task task = parse_task(task_s);
      const auto gold = load_dataset(gold_path, task);
      const auto preds = detail::read_predictions(pred_path);
      std::vector<ClassIndex> p, g;
      std::vector<double> scores;
      std::vector<int> binary;
      bool have_logits = task == Task::A;
      for (const auto& s : gold) {
        const auto it = preds.find(s.id);
        if (it == preds.end()) throw Error(ErrorCode::LengthMismatch, "no prediction for id " + s.id);
        const auto label = find_label(task, it->second.label);
        if (!label) throw Error(ErrorCode::UnknownLabel, "unknown predicted label " + it->second.label);
        p.push_back(*label);
        g.push_back(s.label);
        if (it->second.logits.size() == 2) {
          scores.push_back(it->second.logits[1]);
          binary.push_back(static_cast<int>(s.label));
        } else {
          have_logits = false;
        }
      }
      auto rep = compute_metrics(p, g, num_classes(task));
      if (have_logits && rep.per_class[0].support > 0 && rep.per_class[1].support > 0) rep.auc = auc(scores, binary);
      out << detail::report(rep, task, as_json);
    } else if (views->parsed()) {
      LanguageProfile profile = profile_for(parse_language(language));
      if (!keywords_path.empty()) profile = with_keywords(profile, load_keyword_file(keywords_path));
      const std::string code = detail::read_file(input_path);
      Rng rng = make_rng(view_seed);
      const auto v = make_views(code, profile, mode == "train" ? ViewMode::Train : ViewMode::Infer, rng);
      out << "== prefix\n" << v.prefix.serialize() << "\n== original\n" << v.original << "\n== delex\n" << v.delex
          << "\n== mixed\n" << v.mixed << "\n";
    } else if (synth->parsed()) {
      SynthConfig sc;
      sc.task = parse_task(task_s);
      sc.seed = synth_seed;
      sc.style_gap = style_gap;
      sc.min_statements = min_st;
      sc.max_statements = max_st;
      if (counts_spec.empty()) counts_spec = sc.task == Task::A ? "1000,1000" : "dist/100";
      sc.per_class_counts = parse_counts(counts_spec);
      const auto data = synth_corpus(sc);
      write_dataset(output_path, data);
      out << "wrote " << data.size() << " snippets\n";
    } else if (baseline->parsed()) {
      const Task task = parse_task(task_s);
      const auto gold = load_dataset(gold_path, task);
      std::vector<ClassIndex> g;
      for (const auto& s : gold) g.push_back(s.label);
      out << detail::report(majority_baseline(g, num_classes(task)), task, as_json);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace mvd::cli
