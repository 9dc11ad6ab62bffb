#pragma once

#include <map>
#include <string>

#include "tca/matrix.hpp"

namespace tca {

enum class Activation { Linear, Tanh, Relu, SoftmaxRows };

std::string activation_name(Activation act);
Activation activation_from_name(const std::string& name);  // ConfigError on unknown

// Named gradients, one entry per trainable matrix, keyed like the model
// registry ("encoder.W", "tcl.U", ...). std::map keeps iteration order
// deterministic.
using GradMap = std::map<std::string, Matrix>;

// Time-distributed dense layer: the same affine map plus activation applied
// to every row of the input.
struct DenseParams {
  Matrix W;  // d_in x d_out
  Matrix b;  // 1 x d_out

  int d_in() const { return W.rows(); }
  int d_out() const { return W.cols(); }

  // Glorot-uniform W, zero bias.
  static DenseParams init(int d_in, int d_out, Rng& rng);
};

struct DenseCache {
  Matrix X;  // forward input
  Matrix Z;  // pre-activation X*W + b
  Matrix Y;  // activation output
  Activation act = Activation::Linear;
};

// Y = act(X*W + b), b broadcast to each row. Fills *cache when given.
Matrix dense_forward(const Matrix& X, const DenseParams& p, Activation act,
                     DenseCache* cache = nullptr);

struct DenseGrads {
  Matrix dW;
  Matrix db;
};

// Backward through activation and affine map. Returns dX.
Matrix dense_backward(const Matrix& dY, const DenseParams& p, const DenseCache& cache,
                      DenseGrads* grads);

// Backward when the caller already holds the gradient w.r.t. the
// pre-activation Z (the fused softmax/cross-entropy path). Returns dX.
Matrix dense_backward_from_preact(const Matrix& dZ, const DenseParams& p, const DenseCache& cache,
                                  DenseGrads* grads);

}  // namespace tca
