#include "scd/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "scd/errors.hpp"
#include "scd/text.hpp"

namespace scd {

namespace {

std::string topic_token(std::size_t topic, std::size_t j) {
  return "t" + std::to_string(topic) + "w" + std::to_string(j);
}

std::string filler_token(std::size_t j) { return "f" + std::to_string(j); }

// Zipf draw over [0, n): token j with weight 1/(j+1)^s via inverse CDF.
std::size_t zipf_below(std::size_t n, double s, RngState& rng) {
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    total += 1.0 / std::pow(static_cast<double>(j + 1), s);
  double u = rng.next_double() * total;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    u -= 1.0 / std::pow(static_cast<double>(j + 1), s);
    if (u < 0.0) return j;
  }
  return n - 1;
}

// One sentence whose topic slots mix two topics: a slot draws from `primary`
// with probability `mix`, otherwise from `secondary`. mix=1 collapses to a
// single-topic sentence. Filler slots are Zipf-skewed so the head fillers
// behave like stopwords shared across every topic.
std::string make_sentence(const SyntheticSpec& spec, std::size_t primary,
                          std::size_t secondary, double mix, RngState rng) {
  const std::size_t span = spec.max_len - spec.min_len + 1;
  const std::size_t len = spec.min_len + rng.next_below(span);
  std::string out;
  for (std::size_t pos = 0; pos < len; ++pos) {
    if (!out.empty()) out += " ";
    if (rng.next_double() < spec.topic_token_prob) {
      const std::size_t topic =
          rng.next_double() < mix ? primary : secondary;
      out += topic_token(topic, rng.next_below(spec.tokens_per_topic));
    } else {
      out += filler_token(
          zipf_below(spec.shared_tokens, spec.zipf_exponent, rng));
    }
  }
  return out;
}

LabeledSet make_labeled(const SyntheticSpec& spec, std::size_t count,
                        RngState rng) {
  LabeledSet set;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t topic = i % spec.num_topics;
    set.sentences.push_back(
        make_sentence(spec, topic, topic, 1.0, rng.child(i + 1)));
    set.labels.push_back(static_cast<int>(topic));
  }
  set.num_classes = static_cast<int>(spec.num_topics);
  return set;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec,
                                 std::uint64_t seed) {
  if (spec.num_topics < 2)
    throw config_error("synthetic: need at least 2 topics");
  if (spec.min_len == 0 || spec.max_len < spec.min_len)
    throw config_error("synthetic: bad sentence length range");
  if (spec.tokens_per_topic == 0 || spec.shared_tokens == 0)
    throw config_error("synthetic: vocabulary sizes must be positive");
  if (spec.zipf_exponent < 0.0)
    throw config_error("synthetic: zipf_exponent must be non-negative");

  const RngState root(seed, 0);
  SyntheticData data;

  RngState corpus_rng = root.child(1);
  data.corpus.reserve(spec.corpus_sentences);
  for (std::size_t i = 0; i < spec.corpus_sentences; ++i) {
    const std::size_t topic = i % spec.num_topics;
    data.corpus.push_back(
        make_sentence(spec, topic, topic, 1.0, corpus_rng.child(i + 1)));
  }

  // Five similarity grades; gold = 5 * (expected same-topic fraction).
  const double grades[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  RngState pair_rng = root.child(2);
  for (std::size_t i = 0; i < spec.num_pairs; ++i) {
    RngState r = pair_rng.child(i + 1);
    const double mix = grades[i % 5];
    const std::size_t k1 = r.next_below(spec.num_topics);
    std::size_t k2 = r.next_below(spec.num_topics - 1);
    if (k2 >= k1) ++k2;
    StsPair p;
    p.sentence_a = make_sentence(spec, k1, k1, 1.0, r.child(1));
    p.sentence_b = make_sentence(spec, k1, k2, mix, r.child(2));
    p.gold = 5.0 * mix;
    data.pairs.push_back(std::move(p));
  }

  data.train_labels = make_labeled(spec, spec.labeled_train, root.child(3));
  data.test_labels = make_labeled(spec, spec.labeled_test, root.child(4));
  return data;
}

void write_synthetic(const SyntheticData& data, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(dir) / name).string();
  };

  {
    std::ofstream out(path("corpus.txt"));
    if (!out) throw data_error("cannot write corpus.txt in " + dir);
    for (const auto& s : data.corpus) out << s << "\n";
  }
  {
    std::ofstream out(path("pairs.tsv"));
    if (!out) throw data_error("cannot write pairs.tsv in " + dir);
    for (const auto& p : data.pairs)
      out << p.sentence_a << "\t" << p.sentence_b << "\t" << fmt_real(p.gold)
          << "\n";
  }
  const auto write_labels = [&](const char* name, const LabeledSet& set) {
    std::ofstream out(path(name));
    if (!out) throw data_error(std::string("cannot write ") + name + " in " + dir);
    for (std::size_t i = 0; i < set.sentences.size(); ++i)
      out << set.labels[i] << "\t" << set.sentences[i] << "\n";
  };
  write_labels("labels_train.tsv", data.train_labels);
  write_labels("labels_test.tsv", data.test_labels);
}

}  // namespace scd
