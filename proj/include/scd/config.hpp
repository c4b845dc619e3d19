#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scd/model.hpp"
#include "scd/objective.hpp"
#include "scd/optimizer.hpp"

namespace scd {

struct DataConfig {
  std::string corpus;        // required for training; no default
  std::string pairs;         // scored sentence pairs, TSV
  std::string train_labels;  // optional labeled set for the transfer probe
  std::string test_labels;
  std::size_t max_seq_len = 64;
  std::size_t vocab_min_count = 1;
  std::size_t vocab_max_size = 30000;
};

struct TrainSection {
  double learning_rate = 1e-3;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::uint64_t max_steps = 0;  // 0 = no cap
  std::uint64_t seed = 42;
  OptimizerKind optimizer = OptimizerKind::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  LossMode ablation = LossMode::joint;
};

struct EvalSection {
  double alignment_gold_min = 4.0;
  double probe_learning_rate = 0.5;
  double probe_l2 = 1e-3;
  std::size_t probe_steps = 500;
  std::size_t embed_batch = 64;
};

struct GridSection {
  double alpha_min = 0.1;
  double alpha_max = 0.5;
  double alpha_step = 0.1;
  double rate_min = 0.1;
  double rate_max = 0.4;
  double rate_step = 0.1;
  std::vector<double> lambdas = {0.1, 0.01, 0.001};
  double fine_alpha_delta = 0.05;
  double fine_alpha_step = 0.01;
  double fine_rate_delta = 0.02;
  double fine_rate_step = 0.01;
  std::uint64_t steps_per_candidate = 40;
};

/// The whole run configuration. Serializes to sectioned key=value text;
/// parsing rejects unknown sections and keys so typos fail loudly.
struct RunConfig {
  DataConfig data;
  ModelShape model;  // vocab_size is derived from the corpus, not a key
  TrainSection train;
  Hyperparams objective;
  EvalSection eval;
  GridSection grid;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

/// Applies one "section.key=value" override.
void apply_override(RunConfig& cfg, const std::string& spec);

}  // namespace scd
