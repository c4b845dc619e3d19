#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "scd/checkpoint.hpp"
#include "scd/config.hpp"
#include "scd/errors.hpp"
#include "scd/eval.hpp"
#include "scd/model.hpp"
#include "scd/rng.hpp"
#include "scd/text.hpp"
#include "scd/trainer.hpp"
#include "scd/vocab.hpp"

// SCD_CLI_PATH is injected by the build: absolute path of the scd binary.

namespace fs = std::filesystem;
using namespace scd;

namespace {

struct CmdResult {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("scd_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path operator/(const std::string& name) const { return path / name; }
};

CmdResult run_cli(const TempDir& dir, const std::string& args,
                  const std::string& env_prefix = "") {
  static int n = 0;
  const fs::path log = dir / ("cmd_" + std::to_string(n++) + ".log");
  std::string cmd = env_prefix + SCD_CLI_PATH + " " + args + " > " +
                    log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CmdResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = slurp(log);
  return r;
}

// Small dataset plus a fully resolved config file sized for sub-second runs.
struct Workspace {
  TempDir dir;
  fs::path config;  // tiny.ini inside dir

  Workspace() {
    const CmdResult gen = run_cli(
        dir, "gen-synthetic --topics 4 --sentences 40 --pairs 20"
             " --train-labels 12 --test-labels 12 --seed 5 --out-dir " +
                 (dir / "data").string());
    REQUIRE(gen.code == 0);

    RunConfig cfg = load_config((dir / "data" / "config.ini").string());
    cfg.model.embed_dim = 16;
    cfg.model.hidden_dim = 16;
    cfg.model.projector_dim = 12;
    cfg.model.num_blocks = 1;
    cfg.train.epochs = 2;
    cfg.train.batch_size = 8;
    cfg.train.learning_rate = 0.01;
    cfg.eval.probe_steps = 50;
    config = dir / "tiny.ini";
    spit(config, serialize_config(cfg));
  }

  RunConfig load() const { return load_config(config.string()); }
};

std::map<std::string, double> parse_report(const std::string& text) {
  std::map<std::string, double> values;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    REQUIRE(eq != std::string::npos);
    values[line.substr(0, eq)] = std::strtod(line.c_str() + eq + 3, nullptr);
  }
  return values;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("cli: --help exits 0 and lists subcommands") {
  TempDir dir;
  const CmdResult r = run_cli(dir, "--help");
  CHECK(r.code == 0);
  CHECK(r.output.find("train") != std::string::npos);
  CHECK(r.output.find("gridsearch") != std::string::npos);
}

TEST_CASE("cli: unknown flag is a usage error") {
  TempDir dir;
  const CmdResult r = run_cli(dir, "train --no-such-flag");
  CHECK(r.code == 2);
}

TEST_CASE("cli: missing corpus path names the field") {
  TempDir dir;
  spit(dir / "bare.ini", "[train]\nepochs = 1\n");
  const CmdResult r =
      run_cli(dir, "train --config " + (dir / "bare.ini").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("data.corpus") != std::string::npos);
}

TEST_CASE("cli: unreadable corpus file is a data error") {
  TempDir dir;
  spit(dir / "cfg.ini", "[data]\ncorpus = " + (dir / "absent.txt").string() +
                            "\n");
  const CmdResult r =
      run_cli(dir, "train --config " + (dir / "cfg.ini").string());
  CHECK(r.code == 3);
  CHECK(r.output.find("absent.txt") != std::string::npos);
}

TEST_CASE("cli: unknown override key is a config error") {
  Workspace ws;
  const CmdResult r = run_cli(
      ws.dir, "train --config " + ws.config.string() +
                  " --override train.warmup=10 --out-dir " +
                  (ws.dir / "out").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("train.warmup") != std::string::npos);
}

TEST_CASE("cli: SCD_THREADS is validated") {
  Workspace ws;
  const std::string train_args = "train --config " + ws.config.string() +
                                 " --out-dir " + (ws.dir / "out").string();
  CHECK(run_cli(ws.dir, train_args, "SCD_THREADS=zippy ").code == 2);
  CHECK(run_cli(ws.dir, train_args, "SCD_THREADS=0 ").code == 2);
  CHECK(run_cli(ws.dir, train_args, "SCD_THREADS=2 ").code == 0);
}

TEST_CASE("cli: divergent training exits with the numeric code") {
  Workspace ws;
  const CmdResult r = run_cli(
      ws.dir, "train --config " + ws.config.string() +
                  " --override train.optimizer=sgd"
                  " --override train.learning_rate=1e308"
                  " --override model.activation=identity --out-dir " +
                  (ws.dir / "out").string());
  CHECK(r.code == 4);
  CHECK(r.output.find("diverged") != std::string::npos);
}

TEST_CASE("cli: --seed override beats the file value in the snapshot") {
  Workspace ws;
  const CmdResult r = run_cli(ws.dir, "train --config " + ws.config.string() +
                                          " --seed 7 --out-dir " +
                                          (ws.dir / "out").string());
  REQUIRE(r.code == 0);
  const RunConfig snap =
      load_config((ws.dir / "out" / "config.resolved.ini").string());
  CHECK(snap.train.seed == 7);
}

TEST_CASE("cli: same config twice yields identical loss CSVs and checkpoints") {
  Workspace ws;
  for (const char* out : {"out1", "out2"}) {
    const CmdResult r = run_cli(ws.dir, "train --config " + ws.config.string() +
                                            " --out-dir " +
                                            (ws.dir / out).string());
    REQUIRE(r.code == 0);
  }
  CHECK(slurp(ws.dir / "out1" / "loss.csv") ==
        slurp(ws.dir / "out2" / "loss.csv"));
  CHECK(slurp(ws.dir / "out1" / "checkpoint.ckpt") ==
        slurp(ws.dir / "out2" / "checkpoint.ckpt"));
}

TEST_CASE("cli: eval reports malformed gold scores with line numbers") {
  Workspace ws;
  const CmdResult tr = run_cli(ws.dir, "train --config " + ws.config.string() +
                                           " --out-dir " +
                                           (ws.dir / "out").string());
  REQUIRE(tr.code == 0);

  spit(ws.dir / "bad.tsv",
       "a b\tc d\t3.0\n"
       "e f\tg h\t2.5\n"
       "i j\tk l\tabc\n");
  const CmdResult ev = run_cli(
      ws.dir, "eval --checkpoint " + (ws.dir / "out" / "checkpoint.ckpt").string() +
                  " --override data.pairs=" + (ws.dir / "bad.tsv").string() +
                  " --out-dir " + (ws.dir / "eval").string());
  CHECK(ev.code == 3);
  CHECK(ev.output.find("line 3") != std::string::npos);
}

TEST_CASE("cli: eval report matches the library field for field") {
  Workspace ws;
  const CmdResult tr = run_cli(ws.dir, "train --config " + ws.config.string() +
                                           " --out-dir " +
                                           (ws.dir / "out").string());
  REQUIRE(tr.code == 0);

  const fs::path ckpt = ws.dir / "out" / "checkpoint.ckpt";
  const CmdResult ev =
      run_cli(ws.dir, "eval --checkpoint " + ckpt.string() + " --out-dir " +
                          (ws.dir / "eval").string());
  REQUIRE(ev.code == 0);
  const auto cli = parse_report(slurp(ws.dir / "eval" / "report.txt"));

  const CheckpointData ck = load_checkpoint(ckpt.string());
  const RunConfig cfg = parse_config(ck.config_text);
  Vocab vocab = vocab_from_text(ck.vocab_text);
  ModelShape shape = cfg.model;
  shape.vocab_size = vocab.size();
  ModelParams params = init_model_params(shape, RngState(cfg.train.seed, 0));
  restore_from_checkpoint(ck, params, nullptr);

  const auto pairs = load_pairs_tsv(cfg.data.pairs);
  const LabeledSet train_set = load_labeled_tsv(cfg.data.train_labels);
  const LabeledSet test_set = load_labeled_tsv(cfg.data.test_labels);
  const QualityReport direct =
      build_report(params, vocab, pairs, &train_set, &test_set, cfg.eval,
                   cfg.data.max_seq_len);

  REQUIRE(cli.count("spearman") == 1);
  REQUIRE(cli.count("alignment") == 1);
  REQUIRE(cli.count("uniformity") == 1);
  REQUIRE(cli.count("transfer_accuracy") == 1);
  CHECK(cli.at("spearman") == direct.spearman);
  CHECK(cli.at("alignment") == direct.alignment);
  CHECK(cli.at("uniformity") == direct.uniformity);
  REQUIRE(direct.transfer_accuracy.has_value());
  CHECK(cli.at("transfer_accuracy") == *direct.transfer_accuracy);
}

TEST_CASE("cli: ablate emits four rows and leaves inputs untouched") {
  Workspace ws;
  RunConfig cfg = ws.load();
  const std::string corpus_before = slurp(cfg.data.corpus);
  const std::string pairs_before = slurp(cfg.data.pairs);

  const CmdResult r = run_cli(ws.dir, "ablate --config " + ws.config.string() +
                                          " --out-dir " +
                                          (ws.dir / "abl").string());
  REQUIRE(r.code == 0);

  const auto rows = parse_csv(slurp(ws.dir / "abl" / "ablate.csv"));
  REQUIRE(rows.size() == 5);  // header + 4 modes
  CHECK(rows[0] == std::vector<std::string>{"mode", "spearman"});
  CHECK(rows[1][0] == "joint");
  CHECK(rows[2][0] == "ls_only");
  CHECK(rows[3][0] == "lc_only");
  CHECK(rows[4][0] == "untrained");

  // Untrained row must equal a direct untrained evaluation.
  const auto corpus = load_corpus(cfg.data.corpus);
  const auto pairs = load_pairs_tsv(cfg.data.pairs);
  const TrainResult untrained = make_untrained(corpus, cfg);
  std::vector<double> gold(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) gold[i] = pairs[i].gold;
  const auto sims = score_pairs(untrained.params, untrained.vocab, pairs,
                                cfg.eval, cfg.data.max_seq_len);
  CHECK(std::strtod(rows[4][1].c_str(), nullptr) == spearman(sims, gold));

  CHECK(slurp(cfg.data.corpus) == corpus_before);
  CHECK(slurp(cfg.data.pairs) == pairs_before);
}

TEST_CASE("cli: plotdata rows equal direct eval calls") {
  Workspace ws;
  const CmdResult tr = run_cli(ws.dir, "train --config " + ws.config.string() +
                                           " --out-dir " +
                                           (ws.dir / "out").string());
  REQUIRE(tr.code == 0);

  const fs::path ckpt = ws.dir / "out" / "checkpoint.ckpt";
  const CmdResult pd =
      run_cli(ws.dir, "plotdata --checkpoint " + ckpt.string() + " --out-dir " +
                          (ws.dir / "plot").string());
  REQUIRE(pd.code == 0);

  const auto rows = parse_csv(slurp(ws.dir / "plot" / "plotdata.csv"));
  REQUIRE(rows.size() == 2);  // header + 1 checkpoint
  CHECK(rows[0] ==
        std::vector<std::string>{"name", "alignment", "uniformity", "spearman"});
  REQUIRE(rows[1].size() == 4);

  const CheckpointData ck = load_checkpoint(ckpt.string());
  const RunConfig cfg = parse_config(ck.config_text);
  Vocab vocab = vocab_from_text(ck.vocab_text);
  ModelShape shape = cfg.model;
  shape.vocab_size = vocab.size();
  ModelParams params = init_model_params(shape, RngState(cfg.train.seed, 0));
  restore_from_checkpoint(ck, params, nullptr);
  const auto pairs = load_pairs_tsv(cfg.data.pairs);
  const QualityReport direct = build_report(
      params, vocab, pairs, nullptr, nullptr, cfg.eval, cfg.data.max_seq_len);

  const double align = std::strtod(rows[1][1].c_str(), nullptr);
  const double unif = std::strtod(rows[1][2].c_str(), nullptr);
  const double rho = std::strtod(rows[1][3].c_str(), nullptr);
  CHECK(std::isfinite(align));
  CHECK(std::isfinite(unif));
  CHECK(std::isfinite(rho));
  CHECK(align == direct.alignment);
  CHECK(unif == direct.uniformity);
  CHECK(rho == direct.spearman);
}

TEST_CASE("cli: plotdata names an unloadable checkpoint") {
  Workspace ws;
  const fs::path bogus = ws.dir / "bogus.ckpt";
  spit(bogus, "not a checkpoint");
  const CmdResult r =
      run_cli(ws.dir, "plotdata --checkpoint " + bogus.string() +
                          " --config " + ws.config.string() + " --out-dir " +
                          (ws.dir / "plot").string());
  CHECK(r.code == 3);
  CHECK(r.output.find("bogus.ckpt") != std::string::npos);
}

TEST_CASE("cli: gridsearch winner is the table argmax and reloads cleanly") {
  Workspace ws;
  RunConfig cfg = ws.load();
  cfg.train.epochs = 1;
  cfg.grid.alpha_min = 0.1;
  cfg.grid.alpha_max = 0.2;
  cfg.grid.alpha_step = 0.1;
  cfg.grid.rate_min = 0.1;
  cfg.grid.rate_max = 0.3;
  cfg.grid.rate_step = 0.1;
  cfg.grid.lambdas = {0.01};
  cfg.grid.fine_alpha_delta = 0.0;
  cfg.grid.fine_rate_delta = 0.0;
  cfg.grid.steps_per_candidate = 5;
  const fs::path grid_cfg = ws.dir / "grid.ini";
  spit(grid_cfg, serialize_config(cfg));

  const CmdResult r = run_cli(ws.dir, "gridsearch --config " +
                                          grid_cfg.string() + " --out-dir " +
                                          (ws.dir / "grid").string());
  REQUIRE(r.code == 0);

  // 2 alphas x 3 ordered rate pairs x 1 lambda, plus the degenerate fine pass.
  const auto rows = parse_csv(slurp(ws.dir / "grid" / "grid_scores.csv"));
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == std::vector<std::string>{"pass", "alpha", "lambda", "rate_a",
                                            "rate_b", "spearman"});
  std::size_t coarse = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][0] == "coarse") ++coarse;
  CHECK(coarse == 6);

  std::size_t best_row = 1;
  double best = -2.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double s = std::strtod(rows[i][5].c_str(), nullptr);
    if (s > best) {
      best = s;
      best_row = i;
    }
  }

  const RunConfig winner =
      load_config((ws.dir / "grid" / "best_config.ini").string());
  CHECK(winner.objective.alpha ==
        std::strtod(rows[best_row][1].c_str(), nullptr));
  CHECK(winner.objective.lambda ==
        std::strtod(rows[best_row][2].c_str(), nullptr));
  CHECK(winner.objective.rate_a ==
        std::strtod(rows[best_row][3].c_str(), nullptr));
  CHECK(winner.objective.rate_b ==
        std::strtod(rows[best_row][4].c_str(), nullptr));

  const CmdResult tr = run_cli(
      ws.dir, "train --config " + (ws.dir / "grid" / "best_config.ini").string() +
                  " --override train.epochs=1 --out-dir " +
                  (ws.dir / "winner_out").string());
  CHECK(tr.code == 0);
}

TEST_CASE("cli: resume from a checkpoint continues without error") {
  Workspace ws;
  RunConfig cfg = ws.load();
  cfg.train.epochs = 1;
  const fs::path half_cfg = ws.dir / "half.ini";
  spit(half_cfg, serialize_config(cfg));

  const CmdResult first = run_cli(ws.dir, "train --config " +
                                              half_cfg.string() + " --out-dir " +
                                              (ws.dir / "half").string());
  REQUIRE(first.code == 0);

  const CmdResult resumed = run_cli(
      ws.dir, "train --config " + ws.config.string() + " --resume " +
                  (ws.dir / "half" / "checkpoint.ckpt").string() +
                  " --out-dir " + (ws.dir / "resumed").string());
  REQUIRE(resumed.code == 0);

  const CmdResult full = run_cli(ws.dir, "train --config " +
                                             ws.config.string() + " --out-dir " +
                                             (ws.dir / "full").string());
  REQUIRE(full.code == 0);
  CHECK(slurp(ws.dir / "resumed" / "checkpoint.ckpt") ==
        slurp(ws.dir / "full" / "checkpoint.ckpt"));
}
