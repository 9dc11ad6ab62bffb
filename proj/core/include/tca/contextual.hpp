#pragma once

#include <vector>

#include "tca/layers.hpp"
#include "tca/matrix.hpp"

namespace tca {

// Temporal contextual layer. Maps an n-step sequence of g-dimensional
// latent vectors H to an m-step sequence C through a row-stochastic
// attention matrix A computed from the whole input:
//
//   E = relu(tanh(U*H + P) * V + Q)        (m x n, unnormalised scores)
//   A = row_softmax(E)                     (m x n)
//   C = A * H                              (m x g)
//
// Every attention weight sees all n time steps of H, so row t of A can
// compare input frames against each other instead of scoring each frame in
// isolation.
struct TclParams {
  Matrix U;  // m x n
  Matrix P;  // m x g
  Matrix V;  // g x n
  Matrix Q;  // m x n
  int m = 0;
  int n = 0;
  int g = 0;

  // Glorot-uniform U and V; zero P and Q, which makes the initial attention
  // exactly uniform.
  static TclParams init(int m, int n, int g, Rng& rng);
  static TclParams zeros(int m, int n, int g);
};

struct TclCache {
  Matrix H;   // n x g input
  Matrix Z1;  // U*H + P
  Matrix T1;  // tanh(Z1)
  Matrix Z2;  // T1*V + Q
  Matrix E;   // relu(Z2), pre-mask
  Matrix A;   // row softmax (after mask, if any)
  std::vector<bool> mask;  // empty when no mask was given
};

struct TclOut {
  Matrix C;  // m x g
  Matrix A;  // m x n
};

// Forward pass. When mask is given (length n, at least one true entry),
// masked columns of the score matrix are overwritten with -1e30 before the
// softmax so padded frames receive no attention mass.
TclOut tcl_forward(const Matrix& H, const TclParams& p, TclCache* cache = nullptr,
                   const std::vector<bool>* mask = nullptr);

struct TclGrads {
  Matrix dU, dP, dV, dQ;
};

// Backward pass. dC is the upstream gradient w.r.t. C. Returns dH, which
// combines the value path (A^T * dC) and the score path through U. An
// optional extra gradient w.r.t. A (e.g. from an attention regulariser) is
// added to the attention gradient before the softmax backward.
Matrix tcl_backward(const Matrix& dC, const TclParams& p, const TclCache& cache, TclGrads* grads,
                    const Matrix* dA_extra = nullptr);

// 2mn + gm + gn; equals the number of scalars in TclParams.
long long tcl_param_count(int m, int n, int g);

// Per-step feed-forward attention baseline: each frame is scored from its
// own latent vector only,
//   e_i = tanh(h_i*W + b) * w,  alpha = softmax(e),  c = alpha * H.
struct FfAttParams {
  Matrix W;  // g x a
  Matrix b;  // 1 x a
  Matrix w;  // a x 1
  int g = 0;
  int a = 0;

  static FfAttParams init(int g, int a, Rng& rng);
};

struct FfAttCache {
  Matrix H;       // n x g
  Matrix Zs;      // n x a pre-tanh
  Matrix Us;      // n x a tanh output
  Matrix scores;  // 1 x n
  Matrix alpha;   // 1 x n
};

struct FfAttOut {
  Matrix c;      // 1 x g
  Matrix alpha;  // 1 x n
};

FfAttOut ffatt_forward(const Matrix& H, const FfAttParams& p, FfAttCache* cache = nullptr);

struct FfAttGrads {
  Matrix dW, db, dw;
};

Matrix ffatt_backward(const Matrix& dc, const FfAttParams& p, const FfAttCache& cache,
                      FfAttGrads* grads, const Matrix* dalpha_extra = nullptr);

}  // namespace tca
