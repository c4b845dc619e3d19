#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "scd/matrix.hpp"
#include "scd/rng.hpp"

namespace scd {

enum class Nonlinearity { tanh_fn, relu_fn, identity_fn };

Nonlinearity nonlinearity_from_name(const std::string& name);
const char* nonlinearity_name(Nonlinearity f);

/// Token-embedding + masked mean-pool + a stack of feed-forward blocks.
/// Stands in for a transformer encoder; the losses are encoder-agnostic.
struct EncoderParams {
  Matrix embedding;  // V x e
  struct Block {
    Matrix weight;  // in x out
    Matrix bias;    // 1 x out
  };
  std::vector<Block> blocks;  // block 0: e -> d, later blocks d -> d
  Nonlinearity activation = Nonlinearity::tanh_fn;

  std::size_t vocab_size() const { return embedding.rows(); }
  std::size_t embed_dim() const { return embedding.cols(); }
  std::size_t out_dim() const {
    return blocks.empty() ? embed_dim() : blocks.back().weight.cols();
  }
};

struct BatchNormParams {
  Matrix gamma;         // 1 x width
  Matrix beta;          // 1 x width
  Matrix running_mean;  // 1 x width
  Matrix running_var;   // 1 x width
  double epsilon = 1e-5;
  double momentum = 0.1;
};

/// Three linear layers lifting embeddings to the decorrelation space, with
/// per-hidden-layer batch normalization and ReLU between them.
struct ProjectorParams {
  Matrix w1, b1;  // d -> P
  BatchNormParams bn1;
  Matrix w2, b2;  // P -> P
  BatchNormParams bn2;
  Matrix w3, b3;  // P -> P
  bool relu_before_batchnorm = false;

  std::size_t in_dim() const { return w1.rows(); }
  std::size_t out_dim() const { return w3.cols(); }
};

struct ModelParams {
  EncoderParams encoder;
  ProjectorParams projector;
};

struct EncoderGrads {
  Matrix embedding;
  std::vector<EncoderParams::Block> blocks;
};

struct ProjectorGrads {
  Matrix w1, b1, gamma1, beta1;
  Matrix w2, b2, gamma2, beta2;
  Matrix w3, b3;
};

EncoderGrads zero_grads(const EncoderParams& p);
ProjectorGrads zero_grads(const ProjectorParams& p);

/// Visits trainable tensors in a fixed order (running statistics excluded).
/// Parameter and gradient visits yield index-aligned sequences, which is
/// what the optimizer zips over.
void visit_trainable(EncoderParams& p,
                     const std::function<void(const std::string&, Matrix&)>& fn);
void visit_trainable(ProjectorParams& p,
                     const std::function<void(const std::string&, Matrix&)>& fn);
void visit_trainable(ModelParams& p,
                     const std::function<void(const std::string&, Matrix&)>& fn);
void visit_grads(EncoderGrads& g,
                 const std::function<void(const std::string&, Matrix&)>& fn);
void visit_grads(ProjectorGrads& g,
                 const std::function<void(const std::string&, Matrix&)>& fn);

/// Visits every persistent tensor, running statistics included
/// (checkpoint order).
void visit_state(ModelParams& p,
                 const std::function<void(const std::string&, Matrix&)>& fn);

struct ModelShape {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 64;
  std::size_t num_blocks = 2;
  Nonlinearity activation = Nonlinearity::tanh_fn;
  std::size_t projector_dim = 256;
  double bn_epsilon = 1e-5;
  double bn_momentum = 0.1;
  bool relu_before_batchnorm = false;
};

/// Seeded initialization: embeddings N(0, 0.5), linear layers Xavier-uniform,
/// biases zero, batchnorm at identity.
ModelParams init_model_params(const ModelShape& shape, RngState rng);

}  // namespace scd
