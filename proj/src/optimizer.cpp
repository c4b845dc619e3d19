#include "scd/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "scd/errors.hpp"

namespace scd {

OptimizerKind optimizer_kind_from_name(const std::string& name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  throw config_error("unknown optimizer: " + name);
}

const char* optimizer_kind_name(OptimizerKind k) {
  return k == OptimizerKind::sgd ? "sgd" : "adam";
}

void Optimizer::step(ModelParams& params, EncoderGrads& eg,
                     ProjectorGrads& pg) {
  std::vector<Matrix*> ps;
  visit_trainable(params,
                  [&](const std::string&, Matrix& m) { ps.push_back(&m); });
  std::vector<Matrix*> gs;
  auto collect = [&](const std::string&, Matrix& m) { gs.push_back(&m); };
  visit_grads(eg, collect);
  visit_grads(pg, collect);
  if (ps.size() != gs.size())
    throw std::invalid_argument("Optimizer::step: tensor count mismatch");

  if (cfg_.kind == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (!ps[i]->same_shape(*gs[i]))
        throw std::invalid_argument("Optimizer::step: shape mismatch");
      axpy_in_place(*ps[i], -cfg_.learning_rate, *gs[i]);
    }
    ++t_;
    return;
  }

  if (m_.empty()) {
    for (const Matrix* g : gs) {
      m_.push_back(Matrix(g->rows(), g->cols()));
      v_.push_back(Matrix(g->rows(), g->cols()));
    }
  }
  if (m_.size() != gs.size())
    throw std::invalid_argument("Optimizer::step: moment count mismatch");

  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!ps[i]->same_shape(*gs[i]) || !ps[i]->same_shape(m_[i]))
      throw std::invalid_argument("Optimizer::step: shape mismatch");
    double* p = ps[i]->data();
    const double* g = gs[i]->data();
    double* m = m_[i].data();
    double* v = v_[i].data();
    for (std::size_t k = 0; k < ps[i]->size(); ++k) {
      m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g[k];
      v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g[k] * g[k];
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      p[k] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
    }
  }
}

}  // namespace scd
