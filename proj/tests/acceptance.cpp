// Acceptance audit. Each criterion prints exactly one PASS/FAIL line; the
// process exits nonzero if any criterion fails. Run through ctest or
// directly: ./acceptance
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "scd/checkpoint.hpp"
#include "scd/config.hpp"
#include "scd/encoder.hpp"
#include "scd/errors.hpp"
#include "scd/eval.hpp"
#include "scd/matrix.hpp"
#include "scd/model.hpp"
#include "scd/objective.hpp"
#include "scd/projector.hpp"
#include "scd/rng.hpp"
#include "scd/synthetic.hpp"
#include "scd/text.hpp"
#include "scd/trainer.hpp"
#include "scd/vocab.hpp"

using namespace scd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Benchmark settings shared by criteria 4 and 5. The synthetic task: topic
// clusters with shared filler tokens, graded pair similarities. Fillers are
// heavily Zipf-skewed (the head token takes ~62% of filler draws) and carry
// 30% of each sentence, so the untrained mean-pool space starts with the
// stopword-dominated common direction the objective exists to remove.
// Training uses the desk-scale defaults found by grid-searching this corpus
// family.
SyntheticSpec benchmark_spec() {
  SyntheticSpec spec;
  spec.corpus_sentences = 2000;
  spec.num_pairs = 500;
  spec.topic_token_prob = 0.7;
  spec.zipf_exponent = 2.0;
  return spec;
}

RunConfig benchmark_config(std::uint64_t seed) {
  RunConfig cfg;
  cfg.train.seed = seed;
  cfg.train.epochs = 30;
  cfg.train.batch_size = 32;
  cfg.train.learning_rate = 1e-3;
  cfg.objective.alpha = 0.3;
  cfg.objective.lambda = 0.01;
  cfg.objective.rate_a = 0.05;
  cfg.objective.rate_b = 0.4;
  cfg.data.max_seq_len = 14;
  return cfg;
}

// ---------------------------------------------------------------------------

struct Outcome {
  bool ok = false;
  std::string detail;
};

int g_failed = 0;

void announce(int index, const std::string& name, const Outcome& o) {
  std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << index << " ("
            << name << ")";
  if (!o.detail.empty()) std::cout << ": " << o.detail;
  std::cout << "\n" << std::flush;
  if (!o.ok) ++g_failed;
}

std::string fmt3(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Matrix random_gaussian(std::size_t rows, std::size_t cols, RngState& rng,
                       double sigma = 1.0) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i)
    m.data()[i] = sigma * rng.next_gaussian();
  return m;
}

// Central differences against an analytic gradient; returns the worst
// per-entry relative error with a small-denominator floor (exact-zero
// gradients are routine downstream of batchnorm).
template <typename LossFn>
double fd_worst(Matrix& param, const Matrix& analytic, LossFn&& loss,
                double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double orig = param.data()[i];
    param.data()[i] = orig + h;
    const double lp = loss();
    param.data()[i] = orig - h;
    const double lm = loss();
    param.data()[i] = orig;
    const double fd = (lp - lm) / (2.0 * h);
    const double an = analytic.data()[i];
    const double denom = std::max(1e-3, std::abs(fd) + std::abs(an));
    worst = std::max(worst, std::abs(fd - an) / denom);
  }
  return worst;
}

SentenceBatch random_batch(std::size_t n, std::size_t vocab, RngState& rng) {
  SentenceBatch b;
  b.n = n;
  std::vector<std::vector<int>> rows(n);
  for (auto& r : rows) {
    const std::size_t len = 2 + rng.next_below(4);
    for (std::size_t t = 0; t < len; ++t)
      r.push_back(1 + static_cast<int>(rng.next_below(vocab - 1)));
    b.max_len = std::max(b.max_len, r.size());
  }
  for (const auto& r : rows) {
    b.lengths.push_back(r.size());
    for (std::size_t t = 0; t < b.max_len; ++t)
      b.ids.push_back(t < r.size() ? r[t] : Vocab::kPad);
  }
  return b;
}

// Distance from the nearest kink or singular point in the full pipeline:
// encoder row norms (cosine), projected column norms, and relu inputs.
double pipeline_margin(const ModelParams& params, const SentenceBatch& b,
                       const Hyperparams& hp, RngState rng) {
  ModelParams cp = params;
  EncoderCache ca, cb;
  EncodedPair h =
      encode_pair(cp.encoder, b, hp.rate_a, hp.rate_b, rng, &ca, &cb);
  double margin = 1e300;
  for (const Matrix* m : {&h.a, &h.b})
    for (std::size_t i = 0; i < m->rows(); ++i)
      margin = std::min(margin, row_norm(*m, i));

  for (const Matrix* m : {&h.a, &h.b}) {
    ProjectorCache pc;
    Matrix p = project(cp.projector, *m, true, &pc);
    for (const ProjectorLayerCache* lc : {&pc.l1, &pc.l2}) {
      const BatchNormParams& bn =
          (lc == &pc.l1) ? cp.projector.bn1 : cp.projector.bn2;
      for (std::size_t i = 0; i < lc->bn.xhat.rows(); ++i)
        for (std::size_t j = 0; j < lc->bn.xhat.cols(); ++j)
          margin = std::min(margin, std::abs(bn.gamma(0, j) *
                                                 lc->bn.xhat(i, j) +
                                             bn.beta(0, j)));
    }
    for (std::size_t j = 0; j < p.cols(); ++j) {
      double norm2 = 0.0;
      for (std::size_t i = 0; i < p.rows(); ++i) norm2 += p(i, j) * p(i, j);
      margin = std::min(margin, std::sqrt(norm2));
    }
  }
  return margin;
}

// --------------------------------------------------------------------------
// Criterion 1: analytic gradients vs central finite differences across the
// objective parts and the full chain, 20+ random instances.
Outcome criterion_gradients() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int instances = 0;

  for (int inst = 0; inst < 20; ++inst) {
    RngState rng(9000 + inst, 0);
    const std::size_t n = 4 + inst % 5;    // batch rows 4..8
    const std::size_t d = 8 + inst % 9;    // embed dim 8..16
    const std::size_t p = 16 + inst % 17;  // projector dim 16..32

    Hyperparams hp;
    hp.alpha = 0.2 + 0.1 * (inst % 4);
    hp.lambda = (inst % 3 == 0) ? 0.5 : 0.013;
    hp.rate_a = 0.05 + 0.05 * (inst % 2);
    hp.rate_b = 0.25 + 0.05 * (inst % 3);
    hp.correlation = (inst % 2 == 0) ? CorrelationMode::cosine
                                     : CorrelationMode::elementwise;
    hp.negate_diagonal = (inst / 2) % 2 == 1;

    // Part 1: the self-contrastive term on its own.
    {
      Matrix a = random_gaussian(n, d, rng);
      Matrix b = random_gaussian(n, d, rng);
      Matrix da, db;
      (void)self_contrastive_loss(a, b, &da, &db);
      auto loss = [&]() { return self_contrastive_loss(a, b); };
      worst = std::max(worst, fd_worst(a, da, loss));
      worst = std::max(worst, fd_worst(b, db, loss));
    }

    // Part 2: decorrelation through the cross-correlation, this instance's
    // denominator and diagonal-sign mode.
    {
      Matrix pa = random_gaussian(n, p, rng);
      Matrix pb = random_gaussian(n, p, rng);
      auto lc_loss = [&]() {
        const Matrix c = cross_correlation(pa, pb, hp.correlation);
        return decorrelation_loss(c, hp.lambda, hp.negate_diagonal);
      };
      CrossCorrCache cache;
      const Matrix c = cross_correlation(pa, pb, hp.correlation, &cache);
      Matrix dc;
      (void)decorrelation_loss(c, hp.lambda, hp.negate_diagonal, &dc);
      Matrix dpa, dpb;
      cross_correlation_backward(cache, dc, dpa, dpb);
      worst = std::max(worst, fd_worst(pa, dpa, lc_loss));
      worst = std::max(worst, fd_worst(pb, dpb, lc_loss));
    }

    // Part 3: the full chain, every trainable tensor (embedding and encoder
    // blocks, projector weights and batchnorm). Instances that sit on a relu
    // kink or a near-zero norm are re-rolled; central differences are
    // meaningless across a kink.
    ModelShape shape;
    shape.vocab_size = 12;
    shape.embed_dim = d;
    shape.hidden_dim = d;
    shape.num_blocks = 2;
    shape.projector_dim = p;

    // Margin bar: an fd probe at h=1e-5 moves any pre-activation by well
    // under 1e-4, so 2e-3 of clearance keeps every relu on one side. Larger
    // instances have ~1000 pre-activations, making big margins rare draws.
    ModelParams master;
    SentenceBatch batch;
    RngState drop_rng;
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      master = init_model_params(shape, RngState(500 + inst * 211 + attempt, 0));
      batch = random_batch(n, shape.vocab_size, rng);
      drop_rng = RngState(700 + inst * 13 + attempt, 3);
      placed = pipeline_margin(master, batch, hp, drop_rng) > 2e-3;
    }
    if (!placed)
      return {false, "could not find a kink-free instance " +
                         std::to_string(inst)};

    ModelParams work = master;
    JointLossResult res = joint_loss(batch, work, hp, drop_rng);

    std::vector<Matrix*> params;
    visit_trainable(master,
                    [&](const std::string&, Matrix& m) { params.push_back(&m); });
    std::vector<Matrix*> grads;
    auto collect = [&](const std::string&, Matrix& m) { grads.push_back(&m); };
    visit_grads(res.d_encoder, collect);
    visit_grads(res.d_projector, collect);
    if (params.size() != grads.size())
      return {false, "gradient/parameter tensor lists disagree"};

    auto chain_loss = [&]() {
      ModelParams cp = master;
      return joint_loss(batch, cp, hp, drop_rng).loss.total;
    };
    for (std::size_t t = 0; t < params.size(); ++t)
      worst = std::max(worst, fd_worst(*params[t], *grads[t], chain_loss));
    ++instances;
  }

  const double dt = seconds_since(t0);
  const bool ok = worst < 1e-5 && dt < 60.0 && instances >= 20;
  return {ok, std::to_string(instances) + " instances, worst rel err " +
                  fmt3(worst) + ", " + fmt3(dt) + "s"};
}

// --------------------------------------------------------------------------
// Criterion 2: loss invariants over 1000 random batches plus the literal-mode
// hand case.
Outcome criterion_invariants() {
  RngState rng(333, 0);
  double ls_lo = 1e300, ls_hi = -1e300, worst_c = 0.0;

  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 2 + rng.next_below(7);
    const std::size_t d = 2 + rng.next_below(14);
    const std::size_t p = 2 + rng.next_below(15);

    Matrix ha = random_gaussian(n, d, rng);
    Matrix hb = random_gaussian(n, d, rng);
    const double ls = self_contrastive_loss(ha, hb);
    ls_lo = std::min(ls_lo, ls);
    ls_hi = std::max(ls_hi, ls);
    if (ls < -1.0 || ls > 1.0)
      return {false, "l_s out of range: " + fmt_real(ls)};

    Matrix pa = random_gaussian(n, p, rng);
    Matrix pb = random_gaussian(n, p, rng);
    const Matrix c = cross_correlation(pa, pb, CorrelationMode::cosine);
    for (std::size_t i = 0; i < c.size(); ++i)
      worst_c = std::max(worst_c, std::abs(c.data()[i]));
    if (worst_c > 1.0 + 1e-9)
      return {false, "cosine-mode |C| reached " + fmt_real(worst_c)};

    const double lc = decorrelation_loss(c, 0.5, false);
    if (lc < 0.0)
      return {false, "prose-mode l_c negative: " + fmt_real(lc)};
  }

  // l_c = 0 iff C = I, both directions, prose mode.
  const Matrix eye = Matrix::identity(4);
  if (decorrelation_loss(eye, 0.5, false) != 0.0)
    return {false, "l_c(I) != 0"};
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < 3; ++k) {
      Matrix c = Matrix::identity(3);
      c(j, k) += 1e-6;
      if (!(decorrelation_loss(c, 0.5, false) > 0.0))
        return {false, "perturbed identity scored l_c = 0"};
    }

  // Literal-mode denominator exceeds the cosine bound: columns of ones give
  // C_11 = 2 / sqrt(2) = sqrt(2).
  Matrix ones(2, 1);
  ones.fill(1.0);
  const Matrix c_lit =
      cross_correlation(ones, ones, CorrelationMode::elementwise);
  if (std::abs(c_lit(0, 0) - std::sqrt(2.0)) > 1e-12)
    return {false, "literal-mode hand case C_11 = " + fmt_real(c_lit(0, 0))};

  return {true, "1000 batches, l_s in [" + fmt3(ls_lo) + ", " + fmt3(ls_hi) +
                    "], max |C| " + fmt3(worst_c) + ", literal C_11 = sqrt(2)"};
}

// --------------------------------------------------------------------------
// Criterion 3: closed-form and double-loop oracles.

std::vector<double> oracle_average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double oracle_pearson(const std::vector<double>& x,
                      const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

Outcome criterion_oracles() {
  RngState rng(555, 0);

  // Spearman, ties-free: exact equality with 1 - 6 sum d^2 / (n (n^2 - 1)).
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 5 + rng.next_below(60);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(i);
      b[i] = static_cast<double>(i);
    }
    for (std::size_t i = n; i > 1; --i)
      std::swap(a[i - 1], a[rng.next_below(i)]);
    for (std::size_t i = n; i > 1; --i)
      std::swap(b[i - 1], b[rng.next_below(i)]);

    const auto ra = oracle_average_ranks(a);
    const auto rb = oracle_average_ranks(b);
    double sum_d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      sum_d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    const double nn = static_cast<double>(n);
    const double want = 1.0 - 6.0 * sum_d2 / (nn * (nn * nn - 1.0));
    const double got = spearman(a, b);
    if (got != want)
      return {false, "ties-free spearman " + fmt_real(got) + " != closed form " +
                         fmt_real(want)};
  }

  // Spearman with ties: average-rank construction, 1e-12.
  double worst_tie = 0.0;
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 8 + rng.next_below(40);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng.next_below(5));
      b[i] = static_cast<double>(rng.next_below(4));
    }
    b[0] = 7.0;  // keep b non-constant even in tiny draws
    a[0] = 9.0;
    const double want = oracle_pearson(oracle_average_ranks(a),
                                       oracle_average_ranks(b));
    worst_tie = std::max(worst_tie, std::abs(spearman(a, b) - want));
  }
  if (worst_tie > 1e-12)
    return {false, "tied spearman off by " + fmt3(worst_tie)};

  // Alignment and uniformity against double-loop oracles, 1e-9.
  double worst_au = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 3 + rng.next_below(30);
    const std::size_t d = 2 + rng.next_below(14);
    const Matrix za = normalize_rows(random_gaussian(n, d, rng));
    const Matrix zb = normalize_rows(random_gaussian(n, d, rng));

    double align = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dist2 = 0.0;
      for (std::size_t j = 0; j < d; ++j)
        dist2 += (za(i, j) - zb(i, j)) * (za(i, j) - zb(i, j));
      align += dist2;
    }
    align /= static_cast<double>(n);
    worst_au = std::max(worst_au, std::abs(alignment(za, zb) - align));

    double acc = 0.0;
    std::size_t pairs = 0;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        if (x == y) continue;
        double dist2 = 0.0;
        for (std::size_t j = 0; j < d; ++j)
          dist2 += (za(x, j) - za(y, j)) * (za(x, j) - za(y, j));
        acc += std::exp(-2.0 * dist2);
        ++pairs;
      }
    const double unif = std::log(acc / static_cast<double>(pairs));
    worst_au = std::max(worst_au, std::abs(uniformity(za) - unif));
  }
  if (worst_au > 1e-9)
    return {false, "alignment/uniformity off by " + fmt3(worst_au)};

  // Matmul against the classic triple loop, 1e-12.
  double worst_mm = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t m = 1 + rng.next_below(12);
    const std::size_t k = 1 + rng.next_below(12);
    const std::size_t n2 = 1 + rng.next_below(12);
    const Matrix a = random_gaussian(m, k, rng);
    const Matrix b = random_gaussian(k, n2, rng);
    const Matrix got = matmul(a, b);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n2; ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t < k; ++t) s += a(i, t) * b(t, j);
        worst_mm = std::max(worst_mm, std::abs(got(i, j) - s));
      }
  }
  if (worst_mm > 1e-12) return {false, "matmul off by " + fmt3(worst_mm)};

  return {true, "spearman exact, ties " + fmt3(worst_tie) + ", align/unif " +
                    fmt3(worst_au) + ", matmul " + fmt3(worst_mm)};
}

// --------------------------------------------------------------------------
// Criteria 4 and 5 share five seeded benchmark runs.

struct SeedResult {
  double joint = 0.0, lc = 0.0, ls = 0.0, untrained = 0.0;
  double unif_joint = 0.0, unif_untrained = 0.0;
  double seconds = 0.0;
};

SeedResult run_benchmark_seed(std::uint64_t seed) {
  const auto t0 = Clock::now();
  const SyntheticData data = generate_synthetic(benchmark_spec(), seed);
  RunConfig cfg = benchmark_config(seed);

  const auto report = [&](const TrainResult& r) {
    return build_report(r.params, r.vocab, data.pairs, nullptr, nullptr,
                        cfg.eval, cfg.data.max_seq_len);
  };

  SeedResult out;
  {
    RunConfig c = cfg;
    c.train.ablation = LossMode::joint;
    const QualityReport q = report(train(data.corpus, c));
    out.joint = q.spearman;
    out.unif_joint = q.uniformity;
  }
  {
    RunConfig c = cfg;
    c.train.ablation = LossMode::lc_only;
    out.lc = report(train(data.corpus, c)).spearman;
  }
  {
    RunConfig c = cfg;
    c.train.ablation = LossMode::ls_only;
    out.ls = report(train(data.corpus, c)).spearman;
  }
  {
    const QualityReport q = report(make_untrained(data.corpus, cfg));
    out.untrained = q.spearman;
    out.unif_untrained = q.uniformity;
  }
  out.seconds = seconds_since(t0);
  return out;
}

Outcome criterion_ordering(const std::vector<SeedResult>& seeds) {
  int ordered = 0;
  double mean_joint = 0.0, mean_untrained = 0.0, max_seconds = 0.0;
  std::ostringstream gaps;
  for (const auto& s : seeds) {
    if (s.joint > s.lc && s.lc > s.ls) ++ordered;
    mean_joint += s.joint;
    mean_untrained += s.untrained;
    max_seconds = std::max(max_seconds, s.seconds);
    gaps << (gaps.tellp() > 0 ? " " : "") << fmt3(s.joint - s.lc);
  }
  mean_joint /= static_cast<double>(seeds.size());
  mean_untrained /= static_cast<double>(seeds.size());
  const double margin = mean_joint - mean_untrained;

  const bool ok = ordered >= 4 && margin >= 0.3 && max_seconds < 300.0;
  std::ostringstream d;
  d << "joint > lc_only > ls_only in " << ordered << "/5 seeds (joint-lc per"
    << " seed: " << gaps.str() << "), mean joint " << fmt3(mean_joint)
    << " vs untrained " << fmt3(mean_untrained) << " (margin " << fmt3(margin)
    << "), slowest seed " << fmt3(max_seconds) << "s";
  return {ok, d.str()};
}

Outcome criterion_uniformity(const std::vector<SeedResult>& seeds) {
  int better = 0;
  for (const auto& s : seeds)
    if (s.unif_joint < s.unif_untrained) ++better;
  std::ostringstream d;
  d << "uniformity improved in " << better << "/5 seeds";
  if (!seeds.empty())
    d << " (seed 1: " << fmt3(seeds[0].unif_joint) << " vs untrained "
      << fmt3(seeds[0].unif_untrained) << ")";
  return {better >= 4, d.str()};
}

// --------------------------------------------------------------------------
// Criterion 6: determinism and persistence.

std::string checkpoint_bytes(const TrainResult& r, const RunConfig& cfg) {
  Optimizer opt(OptimizerConfig{});
  opt.restore(r.opt_steps, std::vector<Matrix>(r.opt_m),
              std::vector<Matrix>(r.opt_v));
  ModelParams params = r.params;
  const CheckpointData ck =
      make_checkpoint(serialize_config(cfg), r.vocab, params, &opt, r.steps,
                      cfg.train.seed);
  const fs::path tmp =
      fs::temp_directory_path() /
      ("scd_accept_" + std::to_string(::getpid()) + ".ckpt");
  save_checkpoint(ck, tmp.string());
  std::ifstream in(tmp, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  fs::remove(tmp);
  return buf.str();
}

Outcome criterion_determinism() {
  const SyntheticData data = generate_synthetic(SyntheticSpec{
                                 .corpus_sentences = 96,
                                 .num_pairs = 20,
                                 .labeled_train = 10,
                                 .labeled_test = 10},
                                                7);
  RunConfig cfg;
  cfg.train.seed = 11;
  cfg.train.epochs = 4;
  cfg.train.batch_size = 16;
  cfg.model.embed_dim = 24;
  cfg.model.hidden_dim = 24;
  cfg.model.projector_dim = 32;
  cfg.data.max_seq_len = 14;

  // Same seed twice: byte-identical checkpoints and identical loss CSVs.
  const TrainResult r1 = train(data.corpus, cfg);
  const TrainResult r2 = train(data.corpus, cfg);
  if (loss_log_csv(r1.log) != loss_log_csv(r2.log))
    return {false, "same-seed loss CSVs differ"};
  if (checkpoint_bytes(r1, cfg) != checkpoint_bytes(r2, cfg))
    return {false, "same-seed checkpoints differ"};

  // Resume at the midpoint: step-for-step equal to the uninterrupted run.
  RunConfig half = cfg;
  half.train.epochs = 2;
  const TrainResult rh = train(data.corpus, half);
  Optimizer opt(OptimizerConfig{});
  opt.restore(rh.opt_steps, std::vector<Matrix>(rh.opt_m),
              std::vector<Matrix>(rh.opt_v));
  ModelParams hp = rh.params;
  const CheckpointData mid =
      make_checkpoint(serialize_config(half), rh.vocab, hp, &opt, rh.steps,
                      half.train.seed);
  const TrainResult rr = train(data.corpus, cfg, &mid);

  if (rr.steps != r1.steps) return {false, "resumed run step count differs"};
  const std::size_t tail = rr.log.size();
  if (tail > r1.log.size()) return {false, "resumed log longer than full log"};
  for (std::size_t i = 0; i < tail; ++i) {
    const auto& a = r1.log[r1.log.size() - tail + i];
    const auto& b = rr.log[i];
    if (a.step != b.step || a.loss.total != b.loss.total ||
        a.loss.l_s != b.loss.l_s || a.loss.l_c != b.loss.l_c)
      return {false, "resumed step " + std::to_string(b.step) +
                         " differs from the uninterrupted run"};
  }
  if (checkpoint_bytes(r1, cfg) != checkpoint_bytes(rr, cfg))
    return {false, "resumed checkpoint differs from uninterrupted run"};

  return {true, "same-seed bytes identical; resume replays steps exactly"};
}

// --------------------------------------------------------------------------
// Criterion 7: the paper-faithful configuration runs one step at reduced
// width.
Outcome criterion_paper_config() {
  const std::string ini =
      "[train]\n"
      "learning_rate = 3.0e-5\n"
      "epochs = 1\n"
      "batch_size = 192\n"
      "optimizer = adam\n"
      "[objective]\n"
      "alpha = 0.005\n"
      "lambda = 0.013\n"
      "rate_a = 0.05\n"
      "rate_b = 0.15\n"
      "[model]\n"
      "embed_dim = 32\n"
      "hidden_dim = 32\n"
      "projector_dim = 64\n"
      "[data]\n"
      "max_seq_len = 14\n";
  RunConfig cfg = parse_config(ini);
  cfg.train.seed = 3;

  SyntheticSpec spec;
  spec.corpus_sentences = 200;
  spec.num_pairs = 10;
  spec.labeled_train = 10;
  spec.labeled_test = 10;
  const SyntheticData data = generate_synthetic(spec, 3);

  const TrainResult r = train(data.corpus, cfg);
  if (r.steps != 1)
    return {false, "expected exactly 1 step, got " + std::to_string(r.steps)};
  if (r.log.size() != 1 || !std::isfinite(r.log[0].loss.total))
    return {false, "loss not finite after the paper-faithful step"};
  return {true, "lr 3e-5, batch 192, alpha 0.005, lambda 0.013, rates "
                "0.05/0.15: one step, loss " +
                    fmt3(r.log[0].loss.total)};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional filter: a list of criterion numbers, e.g. "./acceptance 1 3 7".
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  const auto on = [&](int n) { return wanted.empty() || wanted.count(n); };

  if (on(1)) announce(1, "gradient audit", criterion_gradients());
  if (on(2)) announce(2, "loss invariants", criterion_invariants());
  if (on(3)) announce(3, "oracle equivalence", criterion_oracles());

  if (on(4) || on(5)) {
    std::vector<SeedResult> seeds;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
      seeds.push_back(run_benchmark_seed(seed));
    if (on(4)) announce(4, "ablation ordering", criterion_ordering(seeds));
    if (on(5)) announce(5, "uniformity direction", criterion_uniformity(seeds));
  }

  if (on(6)) announce(6, "determinism and persistence", criterion_determinism());
  if (on(7)) announce(7, "paper-faithful config", criterion_paper_config());

  if (g_failed > 0) {
    std::cout << g_failed << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all selected criteria passed\n";
  return 0;
}
