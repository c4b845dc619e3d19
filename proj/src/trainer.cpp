#include "scd/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scd/errors.hpp"
#include "scd/optimizer.hpp"
#include "scd/text.hpp"

namespace scd {

namespace {

// Stream layout under the run seed: 0 reserved for the model init, 1 for
// batch-level dropout, 2 for epoch shuffles. Everything is derived from
// (seed, epoch, batch), never from call history, so a resumed run draws
// the same numbers as an uninterrupted one.
RngState init_rng(std::uint64_t seed) { return RngState(seed, 0); }

RngState batch_rng(std::uint64_t seed, std::uint64_t epoch,
                   std::uint64_t batch) {
  return RngState(seed, 1).child(epoch).child(batch);
}

RngState shuffle_rng(std::uint64_t seed, std::uint64_t epoch) {
  return RngState(seed, 2).child(epoch);
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed,
                                     std::uint64_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngState rng = shuffle_rng(seed, epoch);
  for (std::size_t i = n; i > 1; --i)
    std::swap(order[i - 1], order[rng.next_below(i)]);
  return order;
}

ModelShape shape_for(const RunConfig& cfg, const Vocab& vocab) {
  ModelShape shape = cfg.model;
  shape.vocab_size = vocab.size();
  return shape;
}

OptimizerConfig optimizer_config(const TrainSection& t) {
  OptimizerConfig oc;
  oc.kind = t.optimizer;
  oc.learning_rate = t.learning_rate;
  oc.beta1 = t.beta1;
  oc.beta2 = t.beta2;
  oc.epsilon = t.adam_epsilon;
  return oc;
}

bool finite_loss(const LossBreakdown& l) {
  return std::isfinite(l.total) && std::isfinite(l.l_s) &&
         std::isfinite(l.l_c) && std::isfinite(l.l_c_invariance) &&
         std::isfinite(l.l_c_redundancy);
}

}  // namespace

TrainResult train(const std::vector<std::string>& corpus,
                  const RunConfig& cfg, const CheckpointData* resume) {
  if (corpus.size() < cfg.train.batch_size)
    throw data_error("corpus has " + std::to_string(corpus.size()) +
                     " sentences, fewer than batch_size " +
                     std::to_string(cfg.train.batch_size));

  TrainResult result;
  std::uint64_t start_step = 0;
  if (resume) {
    result.vocab = vocab_from_text(resume->vocab_text);
    start_step = resume->step;
  } else {
    result.vocab = build_vocab(corpus, cfg.data.vocab_min_count,
                               cfg.data.vocab_max_size);
  }

  const std::uint64_t seed = cfg.train.seed;
  result.params =
      init_model_params(shape_for(cfg, result.vocab), init_rng(seed));
  Optimizer opt(optimizer_config(cfg.train));
  if (resume) restore_from_checkpoint(*resume, result.params, &opt);

  const std::uint64_t bpe = corpus.size() / cfg.train.batch_size;
  const std::uint64_t total_steps =
      cfg.train.max_steps == 0
          ? cfg.train.epochs * bpe
          : std::min<std::uint64_t>(cfg.train.epochs * bpe,
                                    cfg.train.max_steps);
  if (start_step > total_steps)
    throw data_error("checkpoint is at step " + std::to_string(start_step) +
                     ", beyond the configured " +
                     std::to_string(total_steps) + " steps");

  std::vector<std::size_t> order;
  std::uint64_t order_epoch = static_cast<std::uint64_t>(-1);
  for (std::uint64_t step = start_step; step < total_steps; ++step) {
    const std::uint64_t epoch = step / bpe;
    const std::uint64_t batch_idx = step % bpe;
    if (epoch != order_epoch) {
      order = epoch_order(corpus.size(), seed, epoch);
      order_epoch = epoch;
    }

    std::vector<std::string> sentences(cfg.train.batch_size);
    for (std::size_t i = 0; i < cfg.train.batch_size; ++i)
      sentences[i] = corpus[order[batch_idx * cfg.train.batch_size + i]];
    const SentenceBatch batch =
        make_batch(sentences, result.vocab, cfg.data.max_seq_len);

    JointLossResult out;
    try {
      out = joint_loss(batch, result.params, cfg.objective,
                       batch_rng(seed, epoch, batch_idx),
                       cfg.train.ablation);
    } catch (const numeric_error& e) {
      throw numeric_error("training diverged at step " +
                          std::to_string(step) + ": " + e.what());
    }
    if (!finite_loss(out.loss))
      throw numeric_error("training diverged at step " +
                          std::to_string(step) + ": non-finite loss");

    opt.step(result.params, out.d_encoder, out.d_projector);
    result.log.push_back({step, out.loss});
  }

  result.steps = total_steps;
  result.opt_steps = opt.steps_taken();
  result.opt_m = opt.first_moments();
  result.opt_v = opt.second_moments();
  return result;
}

TrainResult make_untrained(const std::vector<std::string>& corpus,
                           const RunConfig& cfg) {
  TrainResult result;
  result.vocab =
      build_vocab(corpus, cfg.data.vocab_min_count, cfg.data.vocab_max_size);
  result.params = init_model_params(shape_for(cfg, result.vocab),
                                    init_rng(cfg.train.seed));
  return result;
}

std::string loss_log_csv(const std::vector<TrainLogRow>& log) {
  std::string out = csv_row(
      {"step", "l_s", "l_c_invariance", "l_c_redundancy", "l_c", "total"});
  for (const auto& row : log)
    out += csv_row({std::to_string(row.step), fmt_real(row.loss.l_s),
                    fmt_real(row.loss.l_c_invariance),
                    fmt_real(row.loss.l_c_redundancy), fmt_real(row.loss.l_c),
                    fmt_real(row.loss.total)});
  return out;
}

namespace {

std::vector<double> arange(double lo, double hi, double step) {
  std::vector<double> out;
  if (step <= 0.0) throw config_error("grid: step must be positive");
  for (double x = lo; x <= hi + 1e-12; x += step) out.push_back(x);
  return out;
}

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

std::vector<Hyperparams> coarse_candidates(const RunConfig& base) {
  const auto& g = base.grid;
  std::vector<Hyperparams> out;
  for (const double alpha : arange(g.alpha_min, g.alpha_max, g.alpha_step))
    for (const double ra : arange(g.rate_min, g.rate_max, g.rate_step))
      for (const double rb : arange(g.rate_min, g.rate_max, g.rate_step)) {
        if (!(ra < rb)) continue;
        for (const double lambda : g.lambdas) {
          Hyperparams hp = base.objective;
          hp.alpha = round3(alpha);
          hp.rate_a = round3(ra);
          hp.rate_b = round3(rb);
          hp.lambda = lambda;
          out.push_back(hp);
        }
      }
  return out;
}

std::vector<Hyperparams> fine_candidates(const RunConfig& base,
                                         const Hyperparams& center) {
  const auto& g = base.grid;
  std::vector<Hyperparams> out;
  for (const double alpha :
       arange(center.alpha - g.fine_alpha_delta,
              center.alpha + g.fine_alpha_delta, g.fine_alpha_step)) {
    if (alpha <= 0.0) continue;
    for (const double ra :
         arange(center.rate_a - g.fine_rate_delta,
                center.rate_a + g.fine_rate_delta, g.fine_rate_step)) {
      if (ra < 0.0) continue;
      for (const double rb :
           arange(center.rate_b - g.fine_rate_delta,
                  center.rate_b + g.fine_rate_delta, g.fine_rate_step)) {
        if (rb >= 1.0 || !(ra < rb)) continue;
        Hyperparams hp = center;
        hp.alpha = round3(alpha);
        hp.rate_a = round3(ra);
        hp.rate_b = round3(rb);
        out.push_back(hp);
      }
    }
  }
  return out;
}

double score_candidate(const std::vector<std::string>& corpus,
                       const std::vector<StsPair>& validation,
                       const RunConfig& base, const Hyperparams& hp) {
  RunConfig cfg = base;
  cfg.objective = hp;
  cfg.train.max_steps = base.grid.steps_per_candidate;
  const TrainResult r = train(corpus, cfg);
  const std::vector<double> sims = score_pairs(
      r.params, r.vocab, validation, base.eval, base.data.max_seq_len);
  std::vector<double> gold(validation.size());
  for (std::size_t i = 0; i < validation.size(); ++i)
    gold[i] = validation[i].gold;
  return spearman(sims, gold);
}

}  // namespace

GridResult grid_search(const std::vector<std::string>& corpus,
                       const std::vector<StsPair>& validation,
                       const RunConfig& base) {
  if (validation.empty()) throw data_error("grid search: empty validation set");

  GridResult result;
  const auto run_pass = [&](const std::vector<Hyperparams>& candidates,
                            const char* pass) {
    Hyperparams best;
    double best_score = -2.0;
    for (const auto& hp : candidates) {
      const double score = score_candidate(corpus, validation, base, hp);
      result.table.push_back({hp, score, pass});
      if (score > best_score) {
        best_score = score;
        best = hp;
      }
    }
    return std::make_pair(best, best_score);
  };

  const auto coarse = coarse_candidates(base);
  if (coarse.empty())
    throw config_error("grid search: no candidates satisfy rate_a < rate_b");
  auto [coarse_best, coarse_score] = run_pass(coarse, "coarse");

  const auto fine = fine_candidates(base, coarse_best);
  result.best = coarse_best;
  result.best_score = coarse_score;
  if (!fine.empty()) {
    auto [fine_best, fine_score] = run_pass(fine, "fine");
    if (fine_score > result.best_score) {
      result.best = fine_best;
      result.best_score = fine_score;
    }
  }
  return result;
}

std::string grid_table_csv(const GridResult& g) {
  std::string out =
      csv_row({"pass", "alpha", "lambda", "rate_a", "rate_b", "spearman"});
  for (const auto& c : g.table)
    out += csv_row({c.pass, fmt_real(c.hp.alpha), fmt_real(c.hp.lambda),
                    fmt_real(c.hp.rate_a), fmt_real(c.hp.rate_b),
                    fmt_real(c.score)});
  return out;
}

}  // namespace scd
