#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scd/config.hpp"
#include "scd/model.hpp"
#include "scd/vocab.hpp"

namespace scd {

struct StsPair {
  std::string sentence_a;
  std::string sentence_b;
  double gold = 0.0;  // in [0, 5]
};

/// TSV columns: sentence_a, sentence_b, gold_score. Malformed rows are
/// reported with their line number.
std::vector<StsPair> load_pairs_tsv(const std::string& path);

struct LabeledSet {
  std::vector<std::string> sentences;
  std::vector<int> labels;  // contiguous from 0
  int num_classes = 0;
};

/// TSV columns: label, sentence.
LabeledSet load_labeled_tsv(const std::string& path);

/// Eval-mode sentence embeddings: dropout 0, batchnorm running statistics,
/// no parameter mutation. One row per sentence.
Matrix embed_sentences(const ModelParams& params, const Vocab& vocab,
                       const std::vector<std::string>& sentences,
                       std::size_t batch_size, std::size_t max_seq_len);

/// Cosine similarity per pair under eval-mode embeddings.
std::vector<double> score_pairs(const ModelParams& params, const Vocab& vocab,
                                const std::vector<StsPair>& pairs,
                                const EvalSection& ecfg,
                                std::size_t max_seq_len);

/// Rows scaled to unit L2 norm; zero rows are left untouched.
Matrix normalize_rows(const Matrix& m);

/// Average-rank Spearman correlation. Ties-free inputs take an exact
/// closed-form path; ties fall back to Pearson over fractional ranks.
double spearman(const std::vector<double>& pred,
                const std::vector<double>& gold);

/// Mean squared distance over row-aligned positive pairs (exponent 2).
/// Expects unit-normalized rows.
double alignment(const Matrix& za, const Matrix& zb);

/// log mean over all distinct ordered pairs of exp(-2 ||z_x - z_y||^2).
/// Expects unit-normalized rows, N >= 2.
double uniformity(const Matrix& z);

/// Multinomial logistic-regression probe on frozen embeddings: full-batch
/// gradient descent, L2 penalty on the weights. Returns test accuracy.
double transfer_probe(const ModelParams& params, const Vocab& vocab,
                      const LabeledSet& train, const LabeledSet& test,
                      const EvalSection& ecfg, std::size_t max_seq_len);

struct QualityReport {
  double spearman = 0.0;
  double alignment = 0.0;
  double uniformity = 0.0;
  std::optional<double> transfer_accuracy;
};

/// Full report over a pair set: Spearman on all pairs, alignment on pairs
/// with gold >= eval.alignment_gold_min, uniformity over the distinct
/// sentences, probe accuracy when labeled sets are given.
QualityReport build_report(const ModelParams& params, const Vocab& vocab,
                           const std::vector<StsPair>& pairs,
                           const LabeledSet* train_labels,
                           const LabeledSet* test_labels,
                           const EvalSection& ecfg, std::size_t max_seq_len);

std::string report_text(const QualityReport& r);  // key=value lines
std::string report_csv(const QualityReport& r);   // header + one row

}  // namespace scd
