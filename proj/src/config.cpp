#include "scd/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "scd/errors.hpp"
#include "scd/text.hpp"

namespace scd {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size())
    throw config_error("config: " + key + " expects a number, got \"" + v +
                       "\"");
  return x;
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw config_error("config: " + key + " expects a non-negative integer, got \"" +
                       v + "\"");
  return std::strtoull(v.c_str(), nullptr, 10);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw config_error("config: " + key + " expects true or false, got \"" + v +
                     "\"");
}

std::vector<double> to_real_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_real(key, item));
  }
  if (out.empty())
    throw config_error("config: " + key + " expects a comma-separated list");
  return out;
}

std::string real_list_text(const std::vector<double>& xs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out << ",";
    out << fmt_real(xs[i]);
  }
  return out.str();
}

void set_key(RunConfig& c, const std::string& section, const std::string& key,
             const std::string& value) {
  const std::string full = section + "." + key;
  if (section == "data") {
    if (key == "corpus") c.data.corpus = value;
    else if (key == "pairs") c.data.pairs = value;
    else if (key == "train_labels") c.data.train_labels = value;
    else if (key == "test_labels") c.data.test_labels = value;
    else if (key == "max_seq_len") c.data.max_seq_len = to_count(full, value);
    else if (key == "vocab_min_count") c.data.vocab_min_count = to_count(full, value);
    else if (key == "vocab_max_size") c.data.vocab_max_size = to_count(full, value);
    else throw config_error("config: unknown key " + full);
  } else if (section == "model") {
    if (key == "embed_dim") c.model.embed_dim = to_count(full, value);
    else if (key == "hidden_dim") c.model.hidden_dim = to_count(full, value);
    else if (key == "num_blocks") c.model.num_blocks = to_count(full, value);
    else if (key == "activation") c.model.activation = nonlinearity_from_name(value);
    else if (key == "projector_dim") c.model.projector_dim = to_count(full, value);
    else if (key == "bn_epsilon") c.model.bn_epsilon = to_real(full, value);
    else if (key == "bn_momentum") c.model.bn_momentum = to_real(full, value);
    else if (key == "relu_before_batchnorm")
      c.model.relu_before_batchnorm = to_bool(full, value);
    else throw config_error("config: unknown key " + full);
  } else if (section == "train") {
    if (key == "learning_rate") c.train.learning_rate = to_real(full, value);
    else if (key == "epochs") c.train.epochs = to_count(full, value);
    else if (key == "batch_size") c.train.batch_size = to_count(full, value);
    else if (key == "max_steps") c.train.max_steps = to_count(full, value);
    else if (key == "seed") c.train.seed = to_count(full, value);
    else if (key == "optimizer") c.train.optimizer = optimizer_kind_from_name(value);
    else if (key == "beta1") c.train.beta1 = to_real(full, value);
    else if (key == "beta2") c.train.beta2 = to_real(full, value);
    else if (key == "adam_epsilon") c.train.adam_epsilon = to_real(full, value);
    else if (key == "ablation") c.train.ablation = loss_mode_from_name(value);
    else throw config_error("config: unknown key " + full);
  } else if (section == "objective") {
    if (key == "alpha") c.objective.alpha = to_real(full, value);
    else if (key == "lambda") c.objective.lambda = to_real(full, value);
    else if (key == "rate_a") c.objective.rate_a = to_real(full, value);
    else if (key == "rate_b") c.objective.rate_b = to_real(full, value);
    else if (key == "correlation")
      c.objective.correlation = correlation_mode_from_name(value);
    else if (key == "negate_diagonal")
      c.objective.negate_diagonal = to_bool(full, value);
    else throw config_error("config: unknown key " + full);
  } else if (section == "eval") {
    if (key == "alignment_gold_min") c.eval.alignment_gold_min = to_real(full, value);
    else if (key == "probe_learning_rate")
      c.eval.probe_learning_rate = to_real(full, value);
    else if (key == "probe_l2") c.eval.probe_l2 = to_real(full, value);
    else if (key == "probe_steps") c.eval.probe_steps = to_count(full, value);
    else if (key == "embed_batch") c.eval.embed_batch = to_count(full, value);
    else throw config_error("config: unknown key " + full);
  } else if (section == "grid") {
    if (key == "alpha_min") c.grid.alpha_min = to_real(full, value);
    else if (key == "alpha_max") c.grid.alpha_max = to_real(full, value);
    else if (key == "alpha_step") c.grid.alpha_step = to_real(full, value);
    else if (key == "rate_min") c.grid.rate_min = to_real(full, value);
    else if (key == "rate_max") c.grid.rate_max = to_real(full, value);
    else if (key == "rate_step") c.grid.rate_step = to_real(full, value);
    else if (key == "lambdas") c.grid.lambdas = to_real_list(full, value);
    else if (key == "fine_alpha_delta") c.grid.fine_alpha_delta = to_real(full, value);
    else if (key == "fine_alpha_step") c.grid.fine_alpha_step = to_real(full, value);
    else if (key == "fine_rate_delta") c.grid.fine_rate_delta = to_real(full, value);
    else if (key == "fine_rate_step") c.grid.fine_rate_step = to_real(full, value);
    else if (key == "steps_per_candidate")
      c.grid.steps_per_candidate = to_count(full, value);
    else throw config_error("config: unknown key " + full);
  } else {
    throw config_error("config: unknown section [" + section + "]");
  }
}

void validate(const RunConfig& c) {
  if (c.train.learning_rate <= 0.0)
    throw config_error("config: train.learning_rate must be > 0");
  if (c.train.batch_size < 2)
    throw config_error("config: train.batch_size must be >= 2");
  if (c.train.epochs < 1)
    throw config_error("config: train.epochs must be >= 1");
  if (c.model.embed_dim == 0 || c.model.hidden_dim == 0 ||
      c.model.projector_dim == 0)
    throw config_error("config: model dimensions must be positive");
  if (c.data.max_seq_len == 0)
    throw config_error("config: data.max_seq_len must be positive");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw config_error("config: malformed section header at line " +
                           std::to_string(lineno));
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("config: expected key=value at line " +
                         std::to_string(lineno));
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (section.empty())
      throw config_error("config: key " + key + " appears before any section");
    set_key(cfg, section, key, value);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[data]\n";
  o << "corpus = " << c.data.corpus << "\n";
  o << "pairs = " << c.data.pairs << "\n";
  o << "train_labels = " << c.data.train_labels << "\n";
  o << "test_labels = " << c.data.test_labels << "\n";
  o << "max_seq_len = " << c.data.max_seq_len << "\n";
  o << "vocab_min_count = " << c.data.vocab_min_count << "\n";
  o << "vocab_max_size = " << c.data.vocab_max_size << "\n";
  o << "\n[model]\n";
  o << "embed_dim = " << c.model.embed_dim << "\n";
  o << "hidden_dim = " << c.model.hidden_dim << "\n";
  o << "num_blocks = " << c.model.num_blocks << "\n";
  o << "activation = " << nonlinearity_name(c.model.activation) << "\n";
  o << "projector_dim = " << c.model.projector_dim << "\n";
  o << "bn_epsilon = " << fmt_real(c.model.bn_epsilon) << "\n";
  o << "bn_momentum = " << fmt_real(c.model.bn_momentum) << "\n";
  o << "relu_before_batchnorm = "
    << (c.model.relu_before_batchnorm ? "true" : "false") << "\n";
  o << "\n[train]\n";
  o << "learning_rate = " << fmt_real(c.train.learning_rate) << "\n";
  o << "epochs = " << c.train.epochs << "\n";
  o << "batch_size = " << c.train.batch_size << "\n";
  o << "max_steps = " << c.train.max_steps << "\n";
  o << "seed = " << c.train.seed << "\n";
  o << "optimizer = " << optimizer_kind_name(c.train.optimizer) << "\n";
  o << "beta1 = " << fmt_real(c.train.beta1) << "\n";
  o << "beta2 = " << fmt_real(c.train.beta2) << "\n";
  o << "adam_epsilon = " << fmt_real(c.train.adam_epsilon) << "\n";
  o << "ablation = " << loss_mode_name(c.train.ablation) << "\n";
  o << "\n[objective]\n";
  o << "alpha = " << fmt_real(c.objective.alpha) << "\n";
  o << "lambda = " << fmt_real(c.objective.lambda) << "\n";
  o << "rate_a = " << fmt_real(c.objective.rate_a) << "\n";
  o << "rate_b = " << fmt_real(c.objective.rate_b) << "\n";
  o << "correlation = " << correlation_mode_name(c.objective.correlation)
    << "\n";
  o << "negate_diagonal = "
    << (c.objective.negate_diagonal ? "true" : "false") << "\n";
  o << "\n[eval]\n";
  o << "alignment_gold_min = " << fmt_real(c.eval.alignment_gold_min) << "\n";
  o << "probe_learning_rate = " << fmt_real(c.eval.probe_learning_rate)
    << "\n";
  o << "probe_l2 = " << fmt_real(c.eval.probe_l2) << "\n";
  o << "probe_steps = " << c.eval.probe_steps << "\n";
  o << "embed_batch = " << c.eval.embed_batch << "\n";
  o << "\n[grid]\n";
  o << "alpha_min = " << fmt_real(c.grid.alpha_min) << "\n";
  o << "alpha_max = " << fmt_real(c.grid.alpha_max) << "\n";
  o << "alpha_step = " << fmt_real(c.grid.alpha_step) << "\n";
  o << "rate_min = " << fmt_real(c.grid.rate_min) << "\n";
  o << "rate_max = " << fmt_real(c.grid.rate_max) << "\n";
  o << "rate_step = " << fmt_real(c.grid.rate_step) << "\n";
  o << "lambdas = " << real_list_text(c.grid.lambdas) << "\n";
  o << "fine_alpha_delta = " << fmt_real(c.grid.fine_alpha_delta) << "\n";
  o << "fine_alpha_step = " << fmt_real(c.grid.fine_alpha_step) << "\n";
  o << "fine_rate_delta = " << fmt_real(c.grid.fine_rate_delta) << "\n";
  o << "fine_rate_step = " << fmt_real(c.grid.fine_rate_step) << "\n";
  o << "steps_per_candidate = " << c.grid.steps_per_candidate << "\n";
  return o.str();
}

void apply_override(RunConfig& cfg, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw config_error("override must look like section.key=value: " + spec);
  const std::string path = trim(spec.substr(0, eq));
  const std::string value = trim(spec.substr(eq + 1));
  const auto dot = path.find('.');
  if (dot == std::string::npos)
    throw config_error("override key needs a section prefix: " + path);
  set_key(cfg, path.substr(0, dot), path.substr(dot + 1), value);
  validate(cfg);
}

}  // namespace scd
