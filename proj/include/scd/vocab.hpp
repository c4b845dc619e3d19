#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace scd {

/// Whitespace tokenizer vocabulary. Ids are contiguous from 0 with the three
/// reserved entries first; remaining slots go to the most frequent corpus
/// tokens, ties broken lexicographically.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;

  static const char* pad_token() { return "<pad>"; }
  static const char* unk_token() { return "<unk>"; }
  static const char* cls_token() { return "<cls>"; }

  Vocab();

  std::size_t size() const { return id_to_token_.size(); }
  int id_of(const std::string& token) const;  // kUnk for out-of-vocab
  const std::string& token_of(int id) const;
  bool contains(const std::string& token) const;

  void add_token(const std::string& token);  // ignores duplicates

  const std::vector<std::string>& tokens() const { return id_to_token_; }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

std::vector<std::string> tokenize(const std::string& line);

/// Keeps tokens seen at least min_count times, most frequent first, capped
/// at max_size total entries (reserved entries included).
Vocab build_vocab(const std::vector<std::string>& corpus,
                  std::size_t min_count, std::size_t max_size);

/// One token per line, line number == id.
void save_vocab(const Vocab& vocab, const std::string& path);
Vocab load_vocab(const std::string& path);
std::string vocab_to_text(const Vocab& vocab);
Vocab vocab_from_text(const std::string& text);

/// Corpus file: UTF-8 plain text, one sentence per line. Blank lines are
/// skipped.
std::vector<std::string> load_corpus(const std::string& path);

/// Tokenized sentences, PAD-right to the longest sentence in the batch.
struct SentenceBatch {
  std::size_t n = 0;
  std::size_t max_len = 0;
  std::vector<int> ids;             // n * max_len, row-major
  std::vector<std::size_t> lengths; // per sentence, <= max_len

  int id(std::size_t i, std::size_t pos) const {
    return ids[i * max_len + pos];
  }
};

/// Empty sentences map to a single CLS-analog token so every row pools over
/// at least one position. Sentences longer than max_seq_len are truncated.
SentenceBatch make_batch(const std::vector<std::string>& sentences,
                         const Vocab& vocab, std::size_t max_seq_len = 64);

}  // namespace scd
