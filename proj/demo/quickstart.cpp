// Train a small binary detector on a synthetic corpus and classify one snippet.

#include <iostream>

#include "mvd/mvd.hpp"

int main() {
  using namespace mvd;
  SynthConfig sc;
  sc.task = Task::A;
  sc.per_class_counts = {400, 400};
  sc.seed = 7;
  const auto train = synth_corpus(sc);

  const Vocab vocab = train_bpe(bpe_corpus(as_records(train)), 1500);
  TrainConfig cfg = desk_scaled(TrainConfig::task_a(), train.size());
  const auto result = fit(train, cfg, vocab);

  const char* snippet =
      "def running_total_value(input_data, window_size):\n"
      "    \"\"\"Compute the intermediate value.\"\"\"\n"
      "    # Initialize the result variable\n"
      "    total_count = 0\n"
      "    for item in range(window_size):\n"
      "        total_count += item\n"
      "    return total_count\n";
  const auto pred = predict_code(result.params, snippet, profile_for(Language::Python), vocab, cfg.max_len);
  std::cout << "predicted: " << label_names(Task::A)[pred.label] << "  logits: " << pred.avg_logits[0] << ", "
            << pred.avg_logits[1] << "\n";
}
