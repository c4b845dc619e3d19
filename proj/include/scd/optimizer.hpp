#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scd/model.hpp"

namespace scd {

enum class OptimizerKind { sgd, adam };

OptimizerKind optimizer_kind_from_name(const std::string& name);
const char* optimizer_kind_name(OptimizerKind k);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// SGD or bias-corrected Adam over the trainable tensors, zipped in the
/// fixed visit order. Adam moments are lazily sized on the first step and
/// exposed for checkpointing.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg) : cfg_(cfg) {}

  void step(ModelParams& params, EncoderGrads& eg, ProjectorGrads& pg);

  const OptimizerConfig& config() const { return cfg_; }
  std::uint64_t steps_taken() const { return t_; }

  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }
  void restore(std::uint64_t t, std::vector<Matrix> m, std::vector<Matrix> v) {
    t_ = t;
    m_ = std::move(m);
    v_ = std::move(v);
  }

 private:
  OptimizerConfig cfg_;
  std::uint64_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace scd
