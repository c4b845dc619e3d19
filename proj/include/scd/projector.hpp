#pragma once

#include <vector>

#include "scd/matrix.hpp"
#include "scd/model.hpp"

namespace scd {

struct BatchNormCache {
  Matrix xhat;                   // normalized input
  std::vector<double> inv_std;   // 1/sqrt(var + eps), per column
  bool training = false;
};

/// Training mode normalizes with batch statistics and folds them into the
/// running estimates (unbiased variance for the running update); eval mode
/// normalizes with the running estimates and leaves them untouched.
Matrix batchnorm_forward(BatchNormParams& bn, const Matrix& x, bool training,
                         BatchNormCache* cache = nullptr);

/// Returns dL/dx and accumulates dL/dgamma, dL/dbeta. Training-mode input
/// gradients carry the batch-statistics coupling.
Matrix batchnorm_backward(const BatchNormParams& bn,
                          const BatchNormCache& cache, const Matrix& dy,
                          Matrix& dgamma, Matrix& dbeta);

struct ProjectorLayerCache {
  Matrix in;        // linear input
  BatchNormCache bn;
  Matrix relu_out;  // relu output, wherever the relu sits in the layer
};

struct ProjectorCache {
  ProjectorLayerCache l1;
  ProjectorLayerCache l2;
  Matrix h2;  // input of the final linear layer
  bool training = false;
};

/// Three linear layers; the hidden ones pair batch normalization with a
/// ReLU (order set by relu_before_batchnorm), the last is affine only.
/// Training mode advances the running statistics, so the params are
/// mutable here.
Matrix project(ProjectorParams& p, const Matrix& x, bool training,
               ProjectorCache* cache = nullptr);

/// Accumulates parameter gradients into `grads`, returns dL/d(input).
Matrix project_backward(const ProjectorParams& p, const ProjectorCache& cache,
                        const Matrix& d_out, ProjectorGrads& grads);

}  // namespace scd
