#include "scd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "scd/encoder.hpp"
#include "scd/errors.hpp"
#include "scd/text.hpp"

namespace scd {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
    out.back().pop_back();
  return out;
}

double parse_real_at(const std::string& text, std::size_t lineno,
                     const std::string& what) {
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(x))
    throw data_error("line " + std::to_string(lineno) + ": bad " + what +
                     " \"" + text + "\"");
  return x;
}

}  // namespace

std::vector<StsPair> load_pairs_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open pairs file " + path);
  std::vector<StsPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 3)
      throw data_error("line " + std::to_string(lineno) + ": expected 3 " +
                       "tab-separated columns, got " +
                       std::to_string(cols.size()));
    StsPair p;
    p.sentence_a = cols[0];
    p.sentence_b = cols[1];
    p.gold = parse_real_at(cols[2], lineno, "gold score");
    if (p.gold < 0.0 || p.gold > 5.0)
      throw data_error("line " + std::to_string(lineno) +
                       ": gold score out of [0, 5]: " + cols[2]);
    pairs.push_back(std::move(p));
  }
  if (pairs.empty()) throw data_error("pairs file " + path + " is empty");
  return pairs;
}

LabeledSet load_labeled_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open labeled file " + path);
  LabeledSet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 2)
      throw data_error("line " + std::to_string(lineno) + ": expected 2 " +
                       "tab-separated columns, got " +
                       std::to_string(cols.size()));
    const double raw = parse_real_at(cols[0], lineno, "label");
    const int label = static_cast<int>(raw);
    if (raw != label || label < 0)
      throw data_error("line " + std::to_string(lineno) +
                       ": label must be a non-negative integer, got " +
                       cols[0]);
    set.labels.push_back(label);
    set.sentences.push_back(cols[1]);
  }
  if (set.labels.empty()) throw data_error("labeled file " + path + " is empty");

  std::set<int> seen(set.labels.begin(), set.labels.end());
  set.num_classes = *seen.rbegin() + 1;
  if (set.num_classes < 2)
    throw data_error("labeled file " + path + " needs at least 2 classes");
  if (static_cast<int>(seen.size()) != set.num_classes)
    throw data_error("labeled file " + path +
                     ": labels must be contiguous from 0");
  return set;
}

Matrix embed_sentences(const ModelParams& params, const Vocab& vocab,
                       const std::vector<std::string>& sentences,
                       std::size_t batch_size, std::size_t max_seq_len) {
  if (sentences.empty()) throw data_error("no sentences to embed");
  if (batch_size == 0) batch_size = sentences.size();
  Matrix out(sentences.size(), params.encoder.out_dim());
  for (std::size_t start = 0; start < sentences.size(); start += batch_size) {
    const std::size_t count = std::min(batch_size, sentences.size() - start);
    std::vector<std::string> chunk(sentences.begin() + start,
                                   sentences.begin() + start + count);
    const SentenceBatch batch = make_batch(chunk, vocab, max_seq_len);
    const Matrix h = encode(params.encoder, batch, 0.0, RngState(0, 0));
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = 0; j < h.cols(); ++j)
        out(start + i, j) = h(i, j);
  }
  return out;
}

std::vector<double> score_pairs(const ModelParams& params, const Vocab& vocab,
                                const std::vector<StsPair>& pairs,
                                const EvalSection& ecfg,
                                std::size_t max_seq_len) {
  if (pairs.empty()) throw data_error("empty pair set");
  std::vector<std::string> left, right;
  left.reserve(pairs.size());
  right.reserve(pairs.size());
  for (const auto& p : pairs) {
    left.push_back(p.sentence_a);
    right.push_back(p.sentence_b);
  }
  const Matrix za =
      embed_sentences(params, vocab, left, ecfg.embed_batch, max_seq_len);
  const Matrix zb =
      embed_sentences(params, vocab, right, ecfg.embed_batch, max_seq_len);

  std::vector<double> sims(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double na = row_norm(za, i);
    const double nb = row_norm(zb, i);
    if (na == 0.0 || nb == 0.0)
      throw numeric_error("zero-norm embedding while scoring pair " +
                          std::to_string(i));
    sims[i] = kernels::dot(za.data() + i * za.cols(),
                           zb.data() + i * zb.cols(), za.cols()) /
              (na * nb);
  }
  return sims;
}

Matrix normalize_rows(const Matrix& m) {
  Matrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double n = row_norm(m, i);
    if (n == 0.0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) /= n;
  }
  return out;
}

namespace {

// Average ranks (1-based, fractional on ties). Returns true when ties-free.
bool rank_vector(const std::vector<double>& x, std::vector<double>& ranks) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  ranks.assign(n, 0.0);
  bool ties_free = true;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    if (j != i) ties_free = false;
    i = j + 1;
  }
  return ties_free;
}

}  // namespace

double spearman(const std::vector<double>& pred,
                const std::vector<double>& gold) {
  if (pred.size() != gold.size())
    throw data_error("spearman: length mismatch " +
                     std::to_string(pred.size()) + " vs " +
                     std::to_string(gold.size()));
  const std::size_t n = pred.size();
  if (n < 2) throw data_error("spearman: need at least 2 observations");

  std::vector<double> ra, rb;
  const bool free_a = rank_vector(pred, ra);
  const bool free_b = rank_vector(gold, rb);
  if (std::all_of(pred.begin(), pred.end(),
                  [&](double v) { return v == pred[0]; }))
    throw data_error("spearman: first input is constant");
  if (std::all_of(gold.begin(), gold.end(),
                  [&](double v) { return v == gold[0]; }))
    throw data_error("spearman: second input is constant");

  if (free_a && free_b) {
    // Integer ranks: the d^2 form is exact here.
    double sum_d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = ra[i] - rb[i];
      sum_d2 += d * d;
    }
    const double nn = static_cast<double>(n);
    return 1.0 - 6.0 * sum_d2 / (nn * (nn * nn - 1.0));
  }

  // Pearson over fractional ranks.
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = ra[i] - mean;
    const double dy = rb[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return sxy / std::sqrt(sxx * syy);
}

double alignment(const Matrix& za, const Matrix& zb) {
  if (!za.same_shape(zb))
    throw data_error("alignment: pair matrices must share a shape");
  if (za.rows() == 0) throw data_error("alignment: empty pair set");
  double total = 0.0;
  for (std::size_t i = 0; i < za.rows(); ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < za.cols(); ++j) {
      const double d = za(i, j) - zb(i, j);
      d2 += d * d;
    }
    total += d2;
  }
  return total / static_cast<double>(za.rows());
}

double uniformity(const Matrix& z) {
  const std::size_t n = z.rows();
  if (n < 2) throw data_error("uniformity: need at least 2 embeddings");
  double total = 0.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      double d2 = 0.0;
      for (std::size_t j = 0; j < z.cols(); ++j) {
        const double d = z(x, j) - z(y, j);
        d2 += d * d;
      }
      total += std::exp(-2.0 * d2);
    }
  return std::log(total / (static_cast<double>(n) * (static_cast<double>(n) - 1.0)));
}

double transfer_probe(const ModelParams& params, const Vocab& vocab,
                      const LabeledSet& train, const LabeledSet& test,
                      const EvalSection& ecfg, std::size_t max_seq_len) {
  if (train.sentences.empty() || test.sentences.empty())
    throw data_error("transfer probe: empty labeled set");
  for (const int label : test.labels)
    if (label >= train.num_classes)
      throw data_error("transfer probe: class " + std::to_string(label) +
                       " present in test but absent in train");

  const Matrix x_train = embed_sentences(params, vocab, train.sentences,
                                         ecfg.embed_batch, max_seq_len);
  const Matrix x_test = embed_sentences(params, vocab, test.sentences,
                                        ecfg.embed_batch, max_seq_len);
  const std::size_t n = x_train.rows();
  const std::size_t d = x_train.cols();
  const std::size_t c = static_cast<std::size_t>(train.num_classes);

  Matrix w(d, c);
  Matrix b(1, c);
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t it = 0; it < ecfg.probe_steps; ++it) {
    Matrix logits = matmul(x_train, w);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < c; ++k) logits(i, k) += b(0, k);

    // Softmax rows, then subtract the one-hot target: d(loss)/d(logits).
    for (std::size_t i = 0; i < n; ++i) {
      double mx = logits(i, 0);
      for (std::size_t k = 1; k < c; ++k) mx = std::max(mx, logits(i, k));
      double sum = 0.0;
      for (std::size_t k = 0; k < c; ++k) {
        logits(i, k) = std::exp(logits(i, k) - mx);
        sum += logits(i, k);
      }
      for (std::size_t k = 0; k < c; ++k) logits(i, k) /= sum;
      logits(i, static_cast<std::size_t>(train.labels[i])) -= 1.0;
    }

    Matrix dw = matmul_at_b(x_train, logits);
    Matrix db(1, c);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < c; ++k) db(0, k) += logits(i, k);

    for (std::size_t j = 0; j < w.size(); ++j)
      w.data()[j] -= ecfg.probe_learning_rate *
                     (dw.data()[j] * inv_n + ecfg.probe_l2 * w.data()[j]);
    for (std::size_t k = 0; k < c; ++k)
      b(0, k) -= ecfg.probe_learning_rate * db(0, k) * inv_n;
  }

  std::size_t correct = 0;
  for (std::size_t i = 0; i < x_test.rows(); ++i) {
    std::size_t best = 0;
    double best_score = -1e308;
    for (std::size_t k = 0; k < c; ++k) {
      double s = b(0, k);
      for (std::size_t j = 0; j < d; ++j) s += x_test(i, j) * w(j, k);
      if (s > best_score) {
        best_score = s;
        best = k;
      }
    }
    if (static_cast<int>(best) == test.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(x_test.rows());
}

QualityReport build_report(const ModelParams& params, const Vocab& vocab,
                           const std::vector<StsPair>& pairs,
                           const LabeledSet* train_labels,
                           const LabeledSet* test_labels,
                           const EvalSection& ecfg, std::size_t max_seq_len) {
  QualityReport r;

  const std::vector<double> sims =
      score_pairs(params, vocab, pairs, ecfg, max_seq_len);
  std::vector<double> gold(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) gold[i] = pairs[i].gold;
  r.spearman = spearman(sims, gold);

  std::vector<std::string> pos_a, pos_b;
  for (const auto& p : pairs)
    if (p.gold >= ecfg.alignment_gold_min) {
      pos_a.push_back(p.sentence_a);
      pos_b.push_back(p.sentence_b);
    }
  if (pos_a.empty())
    throw data_error("no positive pairs with gold >= " +
                     fmt_real(ecfg.alignment_gold_min) +
                     " for the alignment metric");
  const Matrix za = normalize_rows(
      embed_sentences(params, vocab, pos_a, ecfg.embed_batch, max_seq_len));
  const Matrix zb = normalize_rows(
      embed_sentences(params, vocab, pos_b, ecfg.embed_batch, max_seq_len));
  r.alignment = alignment(za, zb);

  std::set<std::string> unique;
  for (const auto& p : pairs) {
    unique.insert(p.sentence_a);
    unique.insert(p.sentence_b);
  }
  std::vector<std::string> sentences(unique.begin(), unique.end());
  const Matrix zu = normalize_rows(embed_sentences(
      params, vocab, sentences, ecfg.embed_batch, max_seq_len));
  r.uniformity = uniformity(zu);

  if (train_labels && test_labels)
    r.transfer_accuracy = transfer_probe(params, vocab, *train_labels,
                                         *test_labels, ecfg, max_seq_len);
  return r;
}

std::string report_text(const QualityReport& r) {
  std::ostringstream o;
  o << "spearman = " << fmt_real(r.spearman) << "\n";
  o << "alignment = " << fmt_real(r.alignment) << "\n";
  o << "uniformity = " << fmt_real(r.uniformity) << "\n";
  if (r.transfer_accuracy)
    o << "transfer_accuracy = " << fmt_real(*r.transfer_accuracy) << "\n";
  return o.str();
}

std::string report_csv(const QualityReport& r) {
  std::string out = csv_row({"spearman", "alignment", "uniformity",
                             "transfer_accuracy"});
  out += csv_row({fmt_real(r.spearman), fmt_real(r.alignment),
                  fmt_real(r.uniformity),
                  r.transfer_accuracy ? fmt_real(*r.transfer_accuracy) : ""});
  return out;
}

}  // namespace scd
