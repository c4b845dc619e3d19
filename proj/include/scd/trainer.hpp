#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scd/checkpoint.hpp"
#include "scd/config.hpp"
#include "scd/eval.hpp"
#include "scd/model.hpp"
#include "scd/objective.hpp"
#include "scd/vocab.hpp"

namespace scd {

struct TrainLogRow {
  std::uint64_t step = 0;
  LossBreakdown loss;
};

struct TrainResult {
  ModelParams params;
  Vocab vocab;
  std::vector<TrainLogRow> log;
  std::uint64_t steps = 0;
  std::uint64_t opt_steps = 0;
  std::vector<Matrix> opt_m;  // Adam moments, for checkpointing
  std::vector<Matrix> opt_v;
};

/// Runs the optimization loop: per-epoch seeded shuffle, per-batch joint
/// loss under the configured ablation mode, optimizer update, one log row
/// per step. Partial trailing batches are dropped. Non-finite loss aborts
/// with the offending step index. `resume` continues an earlier run from
/// its saved step; all randomness is a pure function of (seed, step), so a
/// resumed run replays the uninterrupted one exactly.
TrainResult train(const std::vector<std::string>& corpus, const RunConfig& cfg,
                  const CheckpointData* resume = nullptr);

/// Initialized but never-trained model over the same corpus vocabulary;
/// the ablation table's baseline row.
TrainResult make_untrained(const std::vector<std::string>& corpus,
                           const RunConfig& cfg);

std::string loss_log_csv(const std::vector<TrainLogRow>& log);

struct GridCandidate {
  Hyperparams hp;
  double score = 0.0;  // validation Spearman
  std::string pass;    // "coarse" or "fine"
};

struct GridResult {
  Hyperparams best;
  double best_score = 0.0;
  std::vector<GridCandidate> table;
};

/// Coarse sweep over (alpha, rate pair, lambda), then a fine sweep centered
/// on the winner with lambda pinned. Every candidate trains for
/// grid.steps_per_candidate steps from the same seed and is scored by
/// validation Spearman; ties keep the earliest candidate.
GridResult grid_search(const std::vector<std::string>& corpus,
                       const std::vector<StsPair>& validation,
                       const RunConfig& base);

std::string grid_table_csv(const GridResult& g);

}  // namespace scd
