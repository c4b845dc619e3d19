#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scd/eval.hpp"
#include "scd/rng.hpp"

namespace scd {

/// Knobs for the offline topic-cluster corpus. Sentences draw most tokens
/// from one topic's private vocabulary, so topic identity is recoverable
/// from co-occurrence alone; paired sentences share a topic to a controlled
/// degree and are scored by that degree.
struct SyntheticSpec {
  std::size_t num_topics = 10;
  std::size_t tokens_per_topic = 40;
  std::size_t shared_tokens = 30;  // topic-neutral filler vocabulary
  std::size_t corpus_sentences = 2000;
  std::size_t num_pairs = 500;
  std::size_t labeled_train = 200;
  std::size_t labeled_test = 200;
  std::size_t min_len = 8;
  std::size_t max_len = 12;
  double topic_token_prob = 0.8;  // remaining mass goes to shared fillers
  // Filler draws follow a Zipf law with this exponent: token j carries
  // weight 1/(j+1)^s. Natural-language stopword skew is what gives the
  // repulsion term a common direction to remove; 0 makes fillers uniform.
  double zipf_exponent = 1.0;
};

struct SyntheticData {
  std::vector<std::string> corpus;
  std::vector<StsPair> pairs;
  LabeledSet train_labels;
  LabeledSet test_labels;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// Writes corpus.txt, pairs.tsv, labels_train.tsv, labels_test.tsv into dir.
void write_synthetic(const SyntheticData& data, const std::string& dir);

}  // namespace scd
