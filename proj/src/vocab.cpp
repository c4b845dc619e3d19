#include "scd/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "scd/errors.hpp"

namespace scd {

Vocab::Vocab() {
  add_token(pad_token());
  add_token(unk_token());
  add_token(cls_token());
}

int Vocab::id_of(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocab::token_of(int id) const {
  return id_to_token_.at(static_cast<std::size_t>(id));
}

bool Vocab::contains(const std::string& token) const {
  return token_to_id_.count(token) != 0;
}

void Vocab::add_token(const std::string& token) {
  if (token_to_id_.count(token)) return;
  token_to_id_.emplace(token, static_cast<int>(id_to_token_.size()));
  id_to_token_.push_back(token);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

Vocab build_vocab(const std::vector<std::string>& corpus,
                  std::size_t min_count, std::size_t max_size) {
  if (corpus.empty()) throw data_error("build_vocab: empty corpus");

  // std::map keys are already lexicographically sorted, which settles
  // frequency ties deterministically below.
  std::map<std::string, std::size_t> counts;
  for (const auto& line : corpus)
    for (auto& tok : tokenize(line)) ++counts[tok];

  counts.erase(Vocab::pad_token());
  counts.erase(Vocab::unk_token());
  counts.erase(Vocab::cls_token());

  std::vector<std::pair<std::string, std::size_t>> ranked;
  ranked.reserve(counts.size());
  for (auto& kv : counts)
    if (kv.second >= min_count) ranked.emplace_back(kv.first, kv.second);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocab vocab;
  for (const auto& kv : ranked) {
    if (vocab.size() >= max_size) break;
    vocab.add_token(kv.first);
  }
  return vocab;
}

std::string vocab_to_text(const Vocab& vocab) {
  std::string out;
  for (const auto& tok : vocab.tokens()) {
    out += tok;
    out += '\n';
  }
  return out;
}

Vocab vocab_from_text(const std::string& text) {
  std::istringstream in(text);
  Vocab vocab;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    if (lineno < 3) {
      const char* want = lineno == 0   ? Vocab::pad_token()
                         : lineno == 1 ? Vocab::unk_token()
                                       : Vocab::cls_token();
      if (line != want)
        throw data_error("load_vocab: line " + std::to_string(lineno) +
                         " must be the reserved token " + want);
    } else {
      vocab.add_token(line);
    }
    ++lineno;
  }
  if (lineno < 3)
    throw data_error("load_vocab: vocabulary is missing reserved tokens");
  return vocab;
}

void save_vocab(const Vocab& vocab, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("save_vocab: cannot open " + path);
  out << vocab_to_text(vocab);
  if (!out) throw data_error("save_vocab: write failed for " + path);
}

Vocab load_vocab(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("load_vocab: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return vocab_from_text(buf.str());
}

std::vector<std::string> load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open corpus file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!tokenize(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw data_error("corpus file has no sentences: " + path);
  return lines;
}

SentenceBatch make_batch(const std::vector<std::string>& sentences,
                         const Vocab& vocab, std::size_t max_seq_len) {
  SentenceBatch batch;
  batch.n = sentences.size();

  std::vector<std::vector<int>> rows;
  rows.reserve(sentences.size());
  for (const auto& s : sentences) {
    std::vector<int> ids;
    for (const auto& tok : tokenize(s)) {
      if (ids.size() >= max_seq_len) break;
      ids.push_back(vocab.id_of(tok));
    }
    if (ids.empty()) ids.push_back(Vocab::kCls);
    batch.max_len = std::max(batch.max_len, ids.size());
    rows.push_back(std::move(ids));
  }

  batch.ids.assign(batch.n * batch.max_len, Vocab::kPad);
  batch.lengths.resize(batch.n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    batch.lengths[i] = rows[i].size();
    std::copy(rows[i].begin(), rows[i].end(),
              batch.ids.begin() + static_cast<std::ptrdiff_t>(i * batch.max_len));
  }
  return batch;
}

}  // namespace scd
