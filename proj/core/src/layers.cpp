#include "tca/layers.hpp"

#include <cmath>

#include "tca/error.hpp"

namespace tca {

std::string activation_name(Activation act) {
  switch (act) {
    case Activation::Linear: return "linear";
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::SoftmaxRows: return "softmax_rows";
  }
  return "linear";
}

Activation activation_from_name(const std::string& name) {
  if (name == "linear") return Activation::Linear;
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  if (name == "softmax_rows") return Activation::SoftmaxRows;
  throw ConfigError("unknown activation '" + name + "'");
}

DenseParams DenseParams::init(int d_in, int d_out, Rng& rng) {
  DenseParams p;
  p.W = rng_fill(rng, d_in, d_out, Dist::glorot(d_in, d_out));
  p.b = Matrix(1, d_out);
  return p;
}

namespace {

Matrix apply_activation(const Matrix& z, Activation act) {
  switch (act) {
    case Activation::Linear:
      return z;
    case Activation::Tanh: {
      Matrix y = z;
      for (double& v : y.data()) v = std::tanh(v);
      return y;
    }
    case Activation::Relu: {
      Matrix y = z;
      for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
      return y;
    }
    case Activation::SoftmaxRows:
      return row_softmax(z);
  }
  return z;
}

// dZ from dY. relu'(0) is defined as 0.
Matrix activation_vjp(const Matrix& dY, const DenseCache& cache) {
  switch (cache.act) {
    case Activation::Linear:
      return dY;
    case Activation::Tanh: {
      Matrix dZ = dY;
      for (int i = 0; i < dZ.size(); ++i) {
        const double y = cache.Y.data()[i];
        dZ.data()[i] *= 1.0 - y * y;
      }
      return dZ;
    }
    case Activation::Relu: {
      Matrix dZ = dY;
      for (int i = 0; i < dZ.size(); ++i) {
        if (!(cache.Z.data()[i] > 0.0)) dZ.data()[i] = 0.0;
      }
      return dZ;
    }
    case Activation::SoftmaxRows:
      return row_softmax_vjp(cache.Y, dY);
  }
  return dY;
}

}  // namespace

Matrix dense_forward(const Matrix& X, const DenseParams& p, Activation act, DenseCache* cache) {
  if (X.cols() != p.d_in()) {
    throw ShapeError("dense_forward: input " + X.shape_str() + " vs W " + p.W.shape_str());
  }
  if (p.b.rows() != 1 || p.b.cols() != p.d_out()) {
    throw ShapeError("dense_forward: bias " + p.b.shape_str() + " vs W " + p.W.shape_str());
  }
  Matrix Z = add_row_broadcast(matmul(X, p.W), p.b);
  Matrix Y = apply_activation(Z, act);
  if (cache) {
    cache->X = X;
    cache->Z = std::move(Z);
    cache->Y = Y;
    cache->act = act;
  }
  return Y;
}

Matrix dense_backward(const Matrix& dY, const DenseParams& p, const DenseCache& cache,
                      DenseGrads* grads) {
  if (!dY.same_shape(cache.Y)) {
    throw ShapeError("dense_backward: dY " + dY.shape_str() + " vs cached output " +
                     cache.Y.shape_str());
  }
  return dense_backward_from_preact(activation_vjp(dY, cache), p, cache, grads);
}

Matrix dense_backward_from_preact(const Matrix& dZ, const DenseParams& p, const DenseCache& cache,
                                  DenseGrads* grads) {
  if (!dZ.same_shape(cache.Z)) {
    throw ShapeError("dense_backward: dZ " + dZ.shape_str() + " vs cached pre-activation " +
                     cache.Z.shape_str());
  }
  if (cache.X.cols() != p.d_in()) {
    throw ShapeError("dense_backward: cache input " + cache.X.shape_str() + " vs W " +
                     p.W.shape_str());
  }
  if (grads) {
    grads->dW = matmul(transpose(cache.X), dZ);
    grads->db = col_sums(dZ);
  }
  return matmul(dZ, transpose(p.W));
}

}  // namespace tca
