#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scd/checkpoint.hpp"
#include "scd/config.hpp"
#include "scd/errors.hpp"
#include "scd/eval.hpp"
#include "scd/synthetic.hpp"
#include "scd/text.hpp"
#include "scd/trainer.hpp"

namespace {

using namespace scd;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::int64_t seed = -1;  // -1: keep the config file's value
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* opt = cmd->add_option("--config", args.config_path,
                              "run configuration file");
  if (config_required) opt->required();
  cmd->add_option("--out-dir", args.out_dir, "directory for outputs");
  cmd->add_option("--override", args.overrides,
                  "section.key=value override, repeatable");
  cmd->add_option("--seed", args.seed, "seed override, beats the file value");
}

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = load_config(args.config_path);
  for (const auto& ov : args.overrides) apply_override(cfg, ov);
  if (args.seed >= 0)
    cfg.train.seed = static_cast<std::uint64_t>(args.seed);
  return cfg;
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path);
  out << content;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::vector<std::string> corpus_from(const RunConfig& cfg) {
  if (cfg.data.corpus.empty())
    throw config_error("data.corpus is not set; training needs a corpus file");
  return load_corpus(cfg.data.corpus);
}

std::vector<StsPair> pairs_from(const RunConfig& cfg) {
  if (cfg.data.pairs.empty())
    throw config_error("data.pairs is not set; evaluation needs a pairs file");
  return load_pairs_tsv(cfg.data.pairs);
}

Optimizer optimizer_from(const TrainResult& r) {
  Optimizer opt(OptimizerConfig{});
  opt.restore(r.opt_steps, std::vector<Matrix>(r.opt_m),
              std::vector<Matrix>(r.opt_v));
  return opt;
}

void write_train_outputs(const TrainResult& r, const RunConfig& cfg,
                         const std::string& out_dir) {
  const std::string resolved = serialize_config(cfg);
  write_file(out_dir, "config.resolved.ini", resolved);
  write_file(out_dir, "loss.csv", loss_log_csv(r.log));

  Optimizer opt = optimizer_from(r);
  ModelParams params = r.params;
  const CheckpointData ck = make_checkpoint(resolved, r.vocab, params, &opt,
                                            r.steps, cfg.train.seed);
  save_checkpoint(ck, join_path(out_dir, "checkpoint.ckpt"));
}

// Rebuilds the model a checkpoint was trained with: shapes come from the
// embedded config, weights from the stored tensors.
std::pair<ModelParams, Vocab> model_from_checkpoint(const CheckpointData& ck) {
  const RunConfig embedded = parse_config(ck.config_text);
  Vocab vocab = vocab_from_text(ck.vocab_text);
  ModelShape shape = embedded.model;
  shape.vocab_size = vocab.size();
  ModelParams params =
      init_model_params(shape, RngState(embedded.train.seed, 0));
  restore_from_checkpoint(ck, params, nullptr);
  return {std::move(params), std::move(vocab)};
}

int cmd_train(const CommonArgs& args, const std::string& resume_path) {
  const RunConfig cfg = resolve_config(args);
  const auto corpus = corpus_from(cfg);

  TrainResult r;
  if (resume_path.empty()) {
    r = train(corpus, cfg);
  } else {
    const CheckpointData ck = load_checkpoint(resume_path);
    r = train(corpus, cfg, &ck);
  }
  write_train_outputs(r, cfg, args.out_dir);

  std::cout << "trained " << r.steps << " steps";
  if (!r.log.empty())
    std::cout << ", final total loss " << fmt_real(r.log.back().loss.total);
  std::cout << "\ncheckpoint: " << join_path(args.out_dir, "checkpoint.ckpt")
            << "\nloss log: " << join_path(args.out_dir, "loss.csv") << "\n";
  return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& ckpt_path) {
  const CheckpointData ck = load_checkpoint(ckpt_path);

  RunConfig cfg;
  if (args.config_path.empty()) cfg = parse_config(ck.config_text);
  else cfg = load_config(args.config_path);
  for (const auto& ov : args.overrides) apply_override(cfg, ov);

  const auto pairs = pairs_from(cfg);
  auto [params, vocab] = model_from_checkpoint(ck);

  LabeledSet train_set, test_set;
  const bool probe = !cfg.data.train_labels.empty() &&
                     !cfg.data.test_labels.empty();
  if (probe) {
    train_set = load_labeled_tsv(cfg.data.train_labels);
    test_set = load_labeled_tsv(cfg.data.test_labels);
  }

  const QualityReport report = build_report(
      params, vocab, pairs, probe ? &train_set : nullptr,
      probe ? &test_set : nullptr, cfg.eval, cfg.data.max_seq_len);

  std::cout << report_text(report);
  write_file(args.out_dir, "report.txt", report_text(report));
  write_file(args.out_dir, "report.csv", report_csv(report));
  return 0;
}

int cmd_ablate(const CommonArgs& args) {
  const RunConfig base = resolve_config(args);
  const auto corpus = corpus_from(base);
  const auto pairs = pairs_from(base);

  std::vector<double> gold(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) gold[i] = pairs[i].gold;

  const auto score = [&](const TrainResult& r) {
    const auto sims =
        score_pairs(r.params, r.vocab, pairs, base.eval, base.data.max_seq_len);
    return spearman(sims, gold);
  };

  std::string csv = csv_row({"mode", "spearman"});
  for (const char* mode : {"joint", "ls_only", "lc_only", "untrained"}) {
    double s = 0.0;
    if (std::string(mode) == "untrained") {
      s = score(make_untrained(corpus, base));
    } else {
      RunConfig cfg = base;
      cfg.train.ablation = loss_mode_from_name(mode);
      s = score(train(corpus, cfg));
    }
    csv += csv_row({mode, fmt_real(s)});
    std::cout << mode << " spearman " << fmt_real(s) << "\n";
  }
  write_file(args.out_dir, "ablate.csv", csv);
  return 0;
}

int cmd_gridsearch(const CommonArgs& args) {
  const RunConfig base = resolve_config(args);
  const auto corpus = corpus_from(base);
  const auto pairs = pairs_from(base);

  const GridResult g = grid_search(corpus, pairs, base);
  write_file(args.out_dir, "grid_scores.csv", grid_table_csv(g));

  RunConfig winner = base;
  winner.objective = g.best;
  write_file(args.out_dir, "best_config.ini", serialize_config(winner));

  std::cout << "best: alpha " << fmt_real(g.best.alpha) << ", lambda "
            << fmt_real(g.best.lambda) << ", rate_a "
            << fmt_real(g.best.rate_a) << ", rate_b "
            << fmt_real(g.best.rate_b) << ", spearman "
            << fmt_real(g.best_score) << "\n"
            << "score table: " << join_path(args.out_dir, "grid_scores.csv")
            << "\nwinner config: "
            << join_path(args.out_dir, "best_config.ini") << "\n";
  return 0;
}

int cmd_plotdata(const CommonArgs& args,
                 const std::vector<std::string>& ckpt_paths) {
  const CommonArgs& a = args;
  std::string csv = csv_row({"name", "alignment", "uniformity", "spearman"});
  for (const auto& path : ckpt_paths) {
    const CheckpointData ck = load_checkpoint(path);
    RunConfig cfg;
    if (a.config_path.empty()) cfg = parse_config(ck.config_text);
    else cfg = load_config(a.config_path);
    for (const auto& ov : a.overrides) apply_override(cfg, ov);

    const auto pairs = pairs_from(cfg);
    auto [params, vocab] = model_from_checkpoint(ck);
    const QualityReport r = build_report(params, vocab, pairs, nullptr,
                                         nullptr, cfg.eval,
                                         cfg.data.max_seq_len);
    csv += csv_row({path, fmt_real(r.alignment), fmt_real(r.uniformity),
                    fmt_real(r.spearman)});
  }
  write_file(args.out_dir, "plotdata.csv", csv);
  std::cout << csv;
  return 0;
}

int cmd_gen_synthetic(const CommonArgs& args, const SyntheticSpec& spec) {
  const std::uint64_t seed = args.seed >= 0
                                 ? static_cast<std::uint64_t>(args.seed)
                                 : 42;
  const SyntheticData data = generate_synthetic(spec, seed);
  write_synthetic(data, args.out_dir);

  // Starter config pointing at the generated files. Training settings are
  // the ones that do well on this generator's corpora at desk scale; the
  // library defaults target much larger data.
  RunConfig cfg;
  cfg.data.corpus = join_path(args.out_dir, "corpus.txt");
  cfg.data.pairs = join_path(args.out_dir, "pairs.tsv");
  cfg.data.train_labels = join_path(args.out_dir, "labels_train.tsv");
  cfg.data.test_labels = join_path(args.out_dir, "labels_test.tsv");
  cfg.data.max_seq_len = spec.max_len + 2;
  cfg.train.seed = seed;
  cfg.train.epochs = 30;
  cfg.objective.alpha = 0.3;
  cfg.objective.lambda = 0.01;
  cfg.objective.rate_b = 0.4;
  write_file(args.out_dir, "config.ini", serialize_config(cfg));

  std::cout << "wrote corpus.txt (" << data.corpus.size()
            << " sentences), pairs.tsv (" << data.pairs.size()
            << " pairs), labels_train.tsv, labels_test.tsv, config.ini in "
            << args.out_dir << "\n";
  return 0;
}

void check_thread_env() {
  const char* env = std::getenv("SCD_THREADS");
  if (!env) return;
  const std::string v(env);
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos ||
      v == "0")
    throw config_error("SCD_THREADS must be a positive integer, got \"" + v +
                       "\"");
  // Compute paths are single-threaded; any valid cap is honored trivially.
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-contrastive sentence-embedding trainer and evaluator"};
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, ablate_args, grid_args, plot_args,
      gen_args;
  std::string resume_path, eval_ckpt;
  std::vector<std::string> plot_ckpts;
  SyntheticSpec spec;

  auto* train_cmd =
      app.add_subcommand("train", "train a model and write a checkpoint");
  add_common(train_cmd, train_args, true);
  train_cmd->add_option("--resume", resume_path,
                        "checkpoint to continue from");

  auto* eval_cmd =
      app.add_subcommand("eval", "score a checkpoint on a pairs file");
  add_common(eval_cmd, eval_args, false);
  eval_cmd->add_option("--checkpoint", eval_ckpt, "checkpoint to evaluate")
      ->required();

  auto* ablate_cmd = app.add_subcommand(
      "ablate", "train joint and single-term modes and compare");
  add_common(ablate_cmd, ablate_args, true);

  auto* grid_cmd =
      app.add_subcommand("gridsearch", "coarse-to-fine hyperparameter sweep");
  add_common(grid_cmd, grid_args, true);

  auto* plot_cmd = app.add_subcommand(
      "plotdata", "alignment/uniformity/spearman rows per checkpoint");
  add_common(plot_cmd, plot_args, false);
  plot_cmd->add_option("--checkpoint", plot_ckpts, "checkpoint, repeatable")
      ->required();

  auto* gen_cmd = app.add_subcommand(
      "gen-synthetic", "write a seeded synthetic corpus, pairs, and labels");
  add_common(gen_cmd, gen_args, false);
  gen_cmd->add_option("--topics", spec.num_topics, "number of topics");
  gen_cmd->add_option("--sentences", spec.corpus_sentences, "corpus size");
  gen_cmd->add_option("--pairs", spec.num_pairs, "scored pair count");
  gen_cmd->add_option("--train-labels", spec.labeled_train,
                      "labeled training sentences");
  gen_cmd->add_option("--test-labels", spec.labeled_test,
                      "labeled test sentences");
  gen_cmd->add_option("--tokens-per-topic", spec.tokens_per_topic,
                      "private vocabulary per topic");
  gen_cmd->add_option("--shared-tokens", spec.shared_tokens,
                      "size of the shared filler pool");
  gen_cmd->add_option("--topic-token-prob", spec.topic_token_prob,
                      "probability a slot draws from the topic pool");
  gen_cmd->add_option("--zipf", spec.zipf_exponent,
                      "Zipf exponent of the filler distribution, 0 = uniform");
  gen_cmd->add_option("--min-len", spec.min_len, "minimum sentence length");
  gen_cmd->add_option("--max-len", spec.max_len, "maximum sentence length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    check_thread_env();
    if (train_cmd->parsed()) return cmd_train(train_args, resume_path);
    if (eval_cmd->parsed()) return cmd_eval(eval_args, eval_ckpt);
    if (ablate_cmd->parsed()) return cmd_ablate(ablate_args);
    if (grid_cmd->parsed()) return cmd_gridsearch(grid_args);
    if (plot_cmd->parsed()) return cmd_plotdata(plot_args, plot_ckpts);
    if (gen_cmd->parsed()) return cmd_gen_synthetic(gen_args, spec);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
