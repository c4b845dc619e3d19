#include "scd/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include "scd/errors.hpp"

namespace scd {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'D', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_str(std::string& out, const std::string& s) {
  put_u64(out, s.size());
  out += s;
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(
               static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    pos_ += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void raw(char* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_)
      throw data_error("checkpoint: truncated record");
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const CheckpointData& ck, const std::string& path) {
  std::string buf;
  buf.append(kMagic, sizeof(kMagic));
  put_u32(buf, ck.version);
  put_str(buf, ck.config_text);
  put_str(buf, ck.vocab_text);
  put_u64(buf, ck.step);
  put_u64(buf, ck.seed);
  put_u64(buf, ck.opt_steps);
  put_u64(buf, ck.tensors.size());
  for (const auto& [name, m] : ck.tensors) {
    put_str(buf, name);
    put_u64(buf, m.rows());
    put_u64(buf, m.cols());
    for (std::size_t i = 0; i < m.size(); ++i) put_f64(buf, m.data()[i]);
  }
  put_u64(buf, fnv1a64(buf));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error("checkpoint: cannot open " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw data_error("checkpoint: write failed for " + path);
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("checkpoint: cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());

  if (bytes.size() < sizeof(kMagic) + 4 + 8)
    throw data_error("checkpoint: file too short: " + path);
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw data_error("checkpoint: bad magic in " + path);

  const std::string body = bytes.substr(0, bytes.size() - 8);
  Reader tail(bytes.substr(bytes.size() - 8));
  if (fnv1a64(body) != tail.u64())
    throw data_error("checkpoint: checksum mismatch in " + path +
                     " (truncated or corrupted)");

  Reader r(body);
  char magic[8];
  r.raw(magic, sizeof(magic));

  CheckpointData ck;
  ck.version = r.u32();
  if (ck.version != kVersion)
    throw data_error("checkpoint: unsupported format version " +
                     std::to_string(ck.version) + " in " + path);
  ck.config_text = r.str();
  ck.vocab_text = r.str();
  ck.step = r.u64();
  ck.seed = r.u64();
  ck.opt_steps = r.u64();
  const std::uint64_t count = r.u64();
  ck.tensors.reserve(count);
  for (std::uint64_t t = 0; t < count; ++t) {
    std::string name = r.str();
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (cols != 0 && rows > (1ULL << 32) / cols)
      throw data_error("checkpoint: implausible tensor shape for " + name);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = r.f64();
    ck.tensors.emplace_back(std::move(name), std::move(m));
  }
  if (r.remaining() != 0)
    throw data_error("checkpoint: trailing bytes in " + path);
  return ck;
}

CheckpointData make_checkpoint(const std::string& config_text,
                               const Vocab& vocab, ModelParams& params,
                               const Optimizer* opt, std::uint64_t step,
                               std::uint64_t seed) {
  CheckpointData ck;
  ck.config_text = config_text;
  ck.vocab_text = vocab_to_text(vocab);
  ck.step = step;
  ck.seed = seed;
  visit_state(params, [&](const std::string& name, Matrix& m) {
    ck.tensors.emplace_back(name, m);
  });
  if (opt) {
    ck.opt_steps = opt->steps_taken();
    if (!opt->first_moments().empty()) {
      std::vector<std::string> names;
      visit_trainable(params, [&](const std::string& name, Matrix&) {
        names.push_back(name);
      });
      const auto& ms = opt->first_moments();
      const auto& vs = opt->second_moments();
      for (std::size_t i = 0; i < names.size(); ++i)
        ck.tensors.emplace_back("opt.m." + names[i], ms[i]);
      for (std::size_t i = 0; i < names.size(); ++i)
        ck.tensors.emplace_back("opt.v." + names[i], vs[i]);
    }
  }
  return ck;
}

void restore_from_checkpoint(const CheckpointData& ck, ModelParams& params,
                             Optimizer* opt) {
  std::unordered_map<std::string, const Matrix*> by_name;
  for (const auto& [name, m] : ck.tensors) by_name[name] = &m;

  auto fetch = [&](const std::string& name) -> const Matrix& {
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw data_error("checkpoint: missing tensor " + name);
    return *it->second;
  };

  visit_state(params, [&](const std::string& name, Matrix& m) {
    const Matrix& src = fetch(name);
    if (!src.same_shape(m))
      throw data_error("checkpoint: shape mismatch for tensor " + name);
    m = src;
  });

  if (opt) {
    std::vector<std::string> names;
    visit_trainable(params, [&](const std::string& name, Matrix&) {
      names.push_back(name);
    });
    const bool any = by_name.count("opt.m." + names[0]) > 0;
    if (!any && ck.opt_steps > 0)
      throw data_error("checkpoint: optimizer moments missing");
    std::vector<Matrix> ms, vs;
    if (any) {
      for (const auto& n : names) ms.push_back(fetch("opt.m." + n));
      for (const auto& n : names) vs.push_back(fetch("opt.v." + n));
    }
    opt->restore(ck.opt_steps, std::move(ms), std::move(vs));
  }
}

}  // namespace scd
