#include "scd/model.hpp"

#include <cmath>
#include <stdexcept>

#include "scd/errors.hpp"

namespace scd {

Nonlinearity nonlinearity_from_name(const std::string& name) {
  if (name == "tanh") return Nonlinearity::tanh_fn;
  if (name == "relu") return Nonlinearity::relu_fn;
  if (name == "identity") return Nonlinearity::identity_fn;
  throw config_error("unknown nonlinearity: " + name);
}

const char* nonlinearity_name(Nonlinearity f) {
  switch (f) {
    case Nonlinearity::tanh_fn: return "tanh";
    case Nonlinearity::relu_fn: return "relu";
    case Nonlinearity::identity_fn: return "identity";
  }
  return "?";
}

EncoderGrads zero_grads(const EncoderParams& p) {
  EncoderGrads g;
  g.embedding = Matrix(p.embedding.rows(), p.embedding.cols());
  for (const auto& blk : p.blocks)
    g.blocks.push_back({Matrix(blk.weight.rows(), blk.weight.cols()),
                        Matrix(blk.bias.rows(), blk.bias.cols())});
  return g;
}

ProjectorGrads zero_grads(const ProjectorParams& p) {
  ProjectorGrads g;
  g.w1 = Matrix(p.w1.rows(), p.w1.cols());
  g.b1 = Matrix(p.b1.rows(), p.b1.cols());
  g.gamma1 = Matrix(p.bn1.gamma.rows(), p.bn1.gamma.cols());
  g.beta1 = Matrix(p.bn1.beta.rows(), p.bn1.beta.cols());
  g.w2 = Matrix(p.w2.rows(), p.w2.cols());
  g.b2 = Matrix(p.b2.rows(), p.b2.cols());
  g.gamma2 = Matrix(p.bn2.gamma.rows(), p.bn2.gamma.cols());
  g.beta2 = Matrix(p.bn2.beta.rows(), p.bn2.beta.cols());
  g.w3 = Matrix(p.w3.rows(), p.w3.cols());
  g.b3 = Matrix(p.b3.rows(), p.b3.cols());
  return g;
}

using Visitor = std::function<void(const std::string&, Matrix&)>;

void visit_trainable(EncoderParams& p, const Visitor& fn) {
  fn("encoder.embedding", p.embedding);
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    const std::string tag = "encoder.block" + std::to_string(i);
    fn(tag + ".weight", p.blocks[i].weight);
    fn(tag + ".bias", p.blocks[i].bias);
  }
}

void visit_trainable(ProjectorParams& p, const Visitor& fn) {
  fn("projector.w1", p.w1);
  fn("projector.b1", p.b1);
  fn("projector.bn1.gamma", p.bn1.gamma);
  fn("projector.bn1.beta", p.bn1.beta);
  fn("projector.w2", p.w2);
  fn("projector.b2", p.b2);
  fn("projector.bn2.gamma", p.bn2.gamma);
  fn("projector.bn2.beta", p.bn2.beta);
  fn("projector.w3", p.w3);
  fn("projector.b3", p.b3);
}

void visit_trainable(ModelParams& p, const Visitor& fn) {
  visit_trainable(p.encoder, fn);
  visit_trainable(p.projector, fn);
}

void visit_grads(EncoderGrads& g, const Visitor& fn) {
  fn("encoder.embedding", g.embedding);
  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    const std::string tag = "encoder.block" + std::to_string(i);
    fn(tag + ".weight", g.blocks[i].weight);
    fn(tag + ".bias", g.blocks[i].bias);
  }
}

void visit_grads(ProjectorGrads& g, const Visitor& fn) {
  fn("projector.w1", g.w1);
  fn("projector.b1", g.b1);
  fn("projector.bn1.gamma", g.gamma1);
  fn("projector.bn1.beta", g.beta1);
  fn("projector.w2", g.w2);
  fn("projector.b2", g.b2);
  fn("projector.bn2.gamma", g.gamma2);
  fn("projector.bn2.beta", g.beta2);
  fn("projector.w3", g.w3);
  fn("projector.b3", g.b3);
}

void visit_state(ModelParams& p, const Visitor& fn) {
  visit_trainable(p, fn);
  fn("projector.bn1.running_mean", p.projector.bn1.running_mean);
  fn("projector.bn1.running_var", p.projector.bn1.running_var);
  fn("projector.bn2.running_mean", p.projector.bn2.running_mean);
  fn("projector.bn2.running_var", p.projector.bn2.running_var);
}

namespace {

Matrix xavier_uniform(std::size_t fan_in, std::size_t fan_out, RngState rng) {
  Matrix w(fan_in, fan_out);
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (std::size_t i = 0; i < w.size(); ++i)
    w.data()[i] = bound * (2.0 * rng.next_double() - 1.0);
  return w;
}

BatchNormParams identity_batchnorm(std::size_t width, double eps,
                                   double momentum) {
  BatchNormParams bn;
  bn.gamma = Matrix::full(1, width, 1.0);
  bn.beta = Matrix(1, width);
  bn.running_mean = Matrix(1, width);
  bn.running_var = Matrix::full(1, width, 1.0);
  bn.epsilon = eps;
  bn.momentum = momentum;
  return bn;
}

}  // namespace

ModelParams init_model_params(const ModelShape& shape, RngState rng) {
  if (shape.vocab_size == 0)
    throw std::invalid_argument("init_model_params: vocab_size must be set");

  ModelParams mp;

  mp.encoder.activation = shape.activation;
  mp.encoder.embedding =
      Matrix(shape.vocab_size, shape.embed_dim);
  {
    RngState r = rng.child(1);
    for (std::size_t i = 0; i < mp.encoder.embedding.size(); ++i)
      mp.encoder.embedding.data()[i] = 0.5 * r.next_gaussian();
  }
  std::size_t in = shape.embed_dim;
  for (std::size_t b = 0; b < shape.num_blocks; ++b) {
    EncoderParams::Block blk;
    blk.weight = xavier_uniform(in, shape.hidden_dim, rng.child(10 + b));
    blk.bias = Matrix(1, shape.hidden_dim);
    mp.encoder.blocks.push_back(std::move(blk));
    in = shape.hidden_dim;
  }

  const std::size_t d = in;
  const std::size_t proj = shape.projector_dim;
  mp.projector.w1 = xavier_uniform(d, proj, rng.child(100));
  mp.projector.b1 = Matrix(1, proj);
  mp.projector.bn1 =
      identity_batchnorm(proj, shape.bn_epsilon, shape.bn_momentum);
  mp.projector.w2 = xavier_uniform(proj, proj, rng.child(101));
  mp.projector.b2 = Matrix(1, proj);
  mp.projector.bn2 =
      identity_batchnorm(proj, shape.bn_epsilon, shape.bn_momentum);
  mp.projector.w3 = xavier_uniform(proj, proj, rng.child(102));
  mp.projector.b3 = Matrix(1, proj);
  mp.projector.relu_before_batchnorm = shape.relu_before_batchnorm;
  return mp;
}

}  // namespace scd
