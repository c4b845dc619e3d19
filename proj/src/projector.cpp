#include "scd/projector.hpp"

#include <cmath>
#include <stdexcept>

namespace scd {

namespace {

Matrix linear(const Matrix& x, const Matrix& w, const Matrix& b) {
  Matrix z = matmul(x, w);
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += b(0, j);
  return z;
}

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!(y.data()[i] > 0.0)) y.data()[i] = 0.0;
  return y;
}

// d(relu(x)) given relu(x) itself: positive outputs pass the gradient.
Matrix relu_grad_from_out(const Matrix& d, const Matrix& relu_out) {
  Matrix g = d;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(relu_out.data()[i] > 0.0)) g.data()[i] = 0.0;
  return g;
}

void add_colsum(Matrix& acc, const Matrix& d) {
  for (std::size_t j = 0; j < d.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.rows(); ++i) s += d(i, j);
    acc(0, j) += s;
  }
}

}  // namespace

Matrix batchnorm_forward(BatchNormParams& bn, const Matrix& x, bool training,
                         BatchNormCache* cache) {
  const std::size_t n = x.rows();
  const std::size_t w = x.cols();
  if (w != bn.gamma.cols())
    throw std::invalid_argument("batchnorm_forward: width mismatch");
  if (n == 0) throw std::invalid_argument("batchnorm_forward: empty batch");

  Matrix xhat(n, w);
  std::vector<double> inv_std(w);

  if (training) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < w; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
      mean *= inv_n;
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double c = x(i, j) - mean;
        var += c * c;
      }
      var *= inv_n;
      const double inv = 1.0 / std::sqrt(var + bn.epsilon);
      inv_std[j] = inv;
      for (std::size_t i = 0; i < n; ++i) xhat(i, j) = (x(i, j) - mean) * inv;

      const double unbiased =
          n > 1 ? var * static_cast<double>(n) / static_cast<double>(n - 1)
                : var;
      bn.running_mean(0, j) =
          (1.0 - bn.momentum) * bn.running_mean(0, j) + bn.momentum * mean;
      bn.running_var(0, j) =
          (1.0 - bn.momentum) * bn.running_var(0, j) + bn.momentum * unbiased;
    }
  } else {
    for (std::size_t j = 0; j < w; ++j) {
      const double inv = 1.0 / std::sqrt(bn.running_var(0, j) + bn.epsilon);
      inv_std[j] = inv;
      const double mean = bn.running_mean(0, j);
      for (std::size_t i = 0; i < n; ++i) xhat(i, j) = (x(i, j) - mean) * inv;
    }
  }

  Matrix y(n, w);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < w; ++j)
      y(i, j) = bn.gamma(0, j) * xhat(i, j) + bn.beta(0, j);

  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
    cache->training = training;
  }
  return y;
}

Matrix batchnorm_backward(const BatchNormParams& bn,
                          const BatchNormCache& cache, const Matrix& dy,
                          Matrix& dgamma, Matrix& dbeta) {
  const std::size_t n = dy.rows();
  const std::size_t w = dy.cols();
  const Matrix& xhat = cache.xhat;
  if (!dy.same_shape(xhat))
    throw std::invalid_argument("batchnorm_backward: shape mismatch");

  Matrix dx(n, w);
  for (std::size_t j = 0; j < w; ++j) {
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum_dy += dy(i, j);
      sum_dy_xhat += dy(i, j) * xhat(i, j);
    }
    dgamma(0, j) += sum_dy_xhat;
    dbeta(0, j) += sum_dy;

    const double g = bn.gamma(0, j);
    const double inv = cache.inv_std[j];
    if (cache.training) {
      // Batch statistics depend on every row, hence the coupling terms.
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double dxhat = dy(i, j) * g;
        dx(i, j) = inv * (dxhat - inv_n * g * sum_dy -
                          xhat(i, j) * inv_n * g * sum_dy_xhat);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) dx(i, j) = dy(i, j) * g * inv;
    }
  }
  return dx;
}

namespace {

Matrix layer_forward(const Matrix& in, const Matrix& w, const Matrix& b,
                     BatchNormParams& bn, bool relu_first, bool training,
                     ProjectorLayerCache* lc) {
  Matrix z = linear(in, w, b);
  Matrix out;
  if (relu_first) {
    Matrix r = relu(z);
    out = batchnorm_forward(bn, r, training, lc ? &lc->bn : nullptr);
    if (lc) lc->relu_out = std::move(r);
  } else {
    Matrix y = batchnorm_forward(bn, z, training, lc ? &lc->bn : nullptr);
    out = relu(y);
    if (lc) lc->relu_out = out;
  }
  if (lc) lc->in = in;
  return out;
}

Matrix layer_backward(const Matrix& d_out, const Matrix& w,
                      const BatchNormParams& bn, bool relu_first,
                      const ProjectorLayerCache& lc, Matrix& gw, Matrix& gb,
                      Matrix& ggamma, Matrix& gbeta) {
  Matrix dz;
  if (relu_first) {
    Matrix dr = batchnorm_backward(bn, lc.bn, d_out, ggamma, gbeta);
    dz = relu_grad_from_out(dr, lc.relu_out);
  } else {
    Matrix dbn = relu_grad_from_out(d_out, lc.relu_out);
    dz = batchnorm_backward(bn, lc.bn, dbn, ggamma, gbeta);
  }
  add_in_place(gw, matmul_at_b(lc.in, dz));
  add_colsum(gb, dz);
  return matmul_a_bt(dz, w);
}

}  // namespace

Matrix project(ProjectorParams& p, const Matrix& x, bool training,
               ProjectorCache* cache) {
  if (x.cols() != p.in_dim())
    throw std::invalid_argument("project: input width mismatch");
  if (training && x.rows() < 2)
    throw std::invalid_argument(
        "project: training mode needs at least 2 rows for batch statistics");

  Matrix h1 = layer_forward(x, p.w1, p.b1, p.bn1, p.relu_before_batchnorm,
                            training, cache ? &cache->l1 : nullptr);
  Matrix h2 = layer_forward(h1, p.w2, p.b2, p.bn2, p.relu_before_batchnorm,
                            training, cache ? &cache->l2 : nullptr);
  Matrix z3 = linear(h2, p.w3, p.b3);
  if (cache) {
    cache->h2 = std::move(h2);
    cache->training = training;
  }
  z3.ensure_finite("projector output");
  return z3;
}

Matrix project_backward(const ProjectorParams& p, const ProjectorCache& cache,
                        const Matrix& d_out, ProjectorGrads& grads) {
  add_in_place(grads.w3, matmul_at_b(cache.h2, d_out));
  add_colsum(grads.b3, d_out);
  Matrix d_h2 = matmul_a_bt(d_out, p.w3);

  Matrix d_h1 =
      layer_backward(d_h2, p.w2, p.bn2, p.relu_before_batchnorm, cache.l2,
                     grads.w2, grads.b2, grads.gamma2, grads.beta2);
  return layer_backward(d_h1, p.w1, p.bn1, p.relu_before_batchnorm, cache.l1,
                        grads.w1, grads.b1, grads.gamma1, grads.beta1);
}

}  // namespace scd
