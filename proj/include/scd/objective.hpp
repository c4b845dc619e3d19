#pragma once

#include <string>
#include <vector>

#include "scd/matrix.hpp"
#include "scd/model.hpp"
#include "scd/rng.hpp"
#include "scd/vocab.hpp"

namespace scd {

/// How the cross-correlation denominator is formed.
///   cosine:      per-column norms, C_jk = <a_j, b_k> / (|a_j| |b_k|)
///   elementwise: per-entry joint moment, C_jk = <a_j, b_k> / sqrt(sum_i a_ij^2 b_ik^2)
/// Cosine keeps C in [-1, 1]; the elementwise variant can exceed 1.
enum class CorrelationMode { cosine, elementwise };

CorrelationMode correlation_mode_from_name(const std::string& name);
const char* correlation_mode_name(CorrelationMode m);

enum class LossMode { joint, ls_only, lc_only };

LossMode loss_mode_from_name(const std::string& name);
const char* loss_mode_name(LossMode m);

struct Hyperparams {
  double alpha = 0.005;   // weight of the decorrelation term
  double lambda = 0.013;  // off-diagonal weight inside the decorrelation term
  double rate_a = 0.05;   // dropout rate of the first view
  double rate_b = 0.15;   // dropout rate of the second view
  CorrelationMode correlation = CorrelationMode::cosine;
  // Flips the diagonal term to -(1 - C_jj)^2, turning the usual pull
  // toward C_jj = 1 into a push away from it.
  bool negate_diagonal = false;
};

struct LossBreakdown {
  double total = 0.0;
  double l_s = 0.0;             // mean cosine between paired views
  double l_c = 0.0;             // decorrelation term, before the alpha weight
  double l_c_invariance = 0.0;  // signed diagonal part of l_c
  double l_c_redundancy = 0.0;  // lambda-weighted off-diagonal part
  double alpha = 0.0;
  double lambda = 0.0;
};

/// Mean cosine similarity across paired rows, the self-contrastive term.
/// Minimizing it pushes the two views of each sentence apart. Optionally
/// writes dL/d(ha), dL/d(hb). Throws numeric_error on a zero-norm row.
double self_contrastive_loss(const Matrix& ha, const Matrix& hb,
                             Matrix* d_ha = nullptr, Matrix* d_hb = nullptr);

struct CrossCorrCache {
  Matrix a;
  Matrix b;
  Matrix c;
  CorrelationMode mode = CorrelationMode::cosine;
  std::vector<double> col_norm_a;  // cosine mode
  std::vector<double> col_norm_b;
  Matrix s;  // elementwise mode: per-entry squared denominator
};

/// Feature cross-correlation between the projected views, columns of `pa`
/// against columns of `pb`. Cosine mode throws numeric_error on an all-zero
/// column; elementwise mode defines 0/0 entries as 0.
Matrix cross_correlation(const Matrix& pa, const Matrix& pb,
                         CorrelationMode mode,
                         CrossCorrCache* cache = nullptr);

/// dL/d(pa), dL/d(pb) from dL/dC. Overwrites the outputs.
void cross_correlation_backward(const CrossCorrCache& cache, const Matrix& d_c,
                                Matrix& d_pa, Matrix& d_pb);

/// Decorrelation objective over a square correlation matrix:
///   sum_j (1 - C_jj)^2 + lambda * sum_{j != k} C_jk^2
/// with the diagonal term negated when `negate_diagonal` is set.
/// Optionally writes dL/dC and the two signed components.
double decorrelation_loss(const Matrix& c, double lambda, bool negate_diagonal,
                          Matrix* d_c = nullptr, double* invariance = nullptr,
                          double* redundancy = nullptr);

struct ObjectiveGrads {
  Matrix d_ha;
  Matrix d_hb;
  Matrix d_pa;
  Matrix d_pb;
};

/// Combined objective at the representation interface: callers encode and
/// project, this scores and differentiates. `pa`/`pb` may be null in
/// ls_only mode. Dropped terms report as 0, so total == l_s + alpha * l_c
/// in every mode.
LossBreakdown scd_objective(const Matrix& ha, const Matrix& hb,
                            const Matrix* pa, const Matrix* pb,
                            const Hyperparams& hp, LossMode mode,
                            ObjectiveGrads* grads = nullptr);

struct JointLossResult {
  LossBreakdown loss;
  EncoderGrads d_encoder;
  ProjectorGrads d_projector;
};

/// One full training-step evaluation: two dropout views of the batch, the
/// self-contrastive term on the embeddings, the decorrelation term on their
/// projections, and exact gradients for every parameter. The repulsion term
/// only reaches the encoder; the decorrelation term reaches both parameter
/// sets. In ls_only mode the projector is never run, so its running
/// statistics stay frozen; dropped terms report as 0.
///
/// Projections run in training mode, which advances the projector's running
/// statistics.
JointLossResult joint_loss(const SentenceBatch& batch, ModelParams& params,
                           const Hyperparams& hp, RngState rng,
                           LossMode mode = LossMode::joint);

}  // namespace scd
