#include "tca/contextual.hpp"

#include <cmath>

#include "tca/error.hpp"

namespace tca {

namespace {
constexpr double kMaskedScore = -1e30;
}

TclParams TclParams::init(int m, int n, int g, Rng& rng) {
  TclParams p = TclParams::zeros(m, n, g);
  p.U = rng_fill(rng, m, n, Dist::glorot(n, m));
  p.V = rng_fill(rng, g, n, Dist::glorot(g, n));
  return p;
}

TclParams TclParams::zeros(int m, int n, int g) {
  if (m < 1 || n < 1 || g < 1) {
    throw ShapeError("tcl: dimensions must be positive, got m=" + std::to_string(m) +
                     " n=" + std::to_string(n) + " g=" + std::to_string(g));
  }
  TclParams p;
  p.m = m;
  p.n = n;
  p.g = g;
  p.U = Matrix(m, n);
  p.P = Matrix(m, g);
  p.V = Matrix(g, n);
  p.Q = Matrix(m, n);
  return p;
}

TclOut tcl_forward(const Matrix& H, const TclParams& p, TclCache* cache,
                   const std::vector<bool>* mask) {
  if (H.rows() != p.n || H.cols() != p.g) {
    throw ShapeError("tcl_forward: H " + H.shape_str() + " vs layer n=" + std::to_string(p.n) +
                     " g=" + std::to_string(p.g));
  }
  if (mask) {
    if (static_cast<int>(mask->size()) != p.n) {
      throw ShapeError("tcl_forward: mask length " + std::to_string(mask->size()) + " vs n=" +
                       std::to_string(p.n));
    }
    bool any = false;
    for (bool b : *mask) any = any || b;
    if (!any) throw Error("tcl_forward: mask has no valid frames");
  }

  Matrix Z1 = add(matmul(p.U, H), p.P);
  Matrix T1 = Z1;
  for (double& v : T1.data()) v = std::tanh(v);
  Matrix Z2 = add(matmul(T1, p.V), p.Q);
  Matrix E = Z2;
  for (double& v : E.data()) v = v > 0.0 ? v : 0.0;

  Matrix scores = E;
  if (mask) {
    for (int i = 0; i < p.n; ++i) {
      if (!(*mask)[i]) {
        for (int t = 0; t < p.m; ++t) scores.at(t, i) = kMaskedScore;
      }
    }
  }
  Matrix A = row_softmax(scores);
  Matrix C = matmul(A, H);

  if (cache) {
    cache->H = H;
    cache->Z1 = std::move(Z1);
    cache->T1 = std::move(T1);
    cache->Z2 = std::move(Z2);
    cache->E = std::move(E);
    cache->A = A;
    cache->mask = mask ? *mask : std::vector<bool>();
  }
  return {std::move(C), std::move(A)};
}

Matrix tcl_backward(const Matrix& dC, const TclParams& p, const TclCache& cache, TclGrads* grads,
                    const Matrix* dA_extra) {
  if (dC.rows() != p.m || dC.cols() != p.g) {
    throw ShapeError("tcl_backward: dC " + dC.shape_str() + " vs layer m=" + std::to_string(p.m) +
                     " g=" + std::to_string(p.g));
  }
  if (cache.H.rows() != p.n || cache.A.rows() != p.m || cache.A.cols() != p.n) {
    throw ShapeError("tcl_backward: cache does not match layer dimensions");
  }

  // C depends on H twice: through the value mixture A*H and through the
  // scores. Both contributions are accumulated into dH.
  Matrix dA = matmul(dC, transpose(cache.H));  // m x n
  if (dA_extra) {
    if (!dA_extra->same_shape(dA)) {
      throw ShapeError("tcl_backward: dA_extra " + dA_extra->shape_str() + " vs A " +
                       dA.shape_str());
    }
    dA = add(dA, *dA_extra);
  }
  Matrix dH = matmul(transpose(cache.A), dC);  // n x g, value path

  Matrix dE = row_softmax_vjp(cache.A, dA);
  // Masked columns carry exactly zero attention, so dE is already zero
  // there; the relu gate below also needs no special casing.
  Matrix dZ2 = dE;
  for (int i = 0; i < dZ2.size(); ++i) {
    if (!(cache.Z2.data()[i] > 0.0)) dZ2.data()[i] = 0.0;
  }

  Matrix dT1 = matmul(dZ2, transpose(p.V));  // m x g
  Matrix dZ1 = dT1;
  for (int i = 0; i < dZ1.size(); ++i) {
    const double t = cache.T1.data()[i];
    dZ1.data()[i] *= 1.0 - t * t;
  }

  if (grads) {
    grads->dV = matmul(transpose(cache.T1), dZ2);
    grads->dQ = dZ2;
    grads->dU = matmul(dZ1, transpose(cache.H));
    grads->dP = dZ1;
  }
  return add(dH, matmul(transpose(p.U), dZ1));
}

long long tcl_param_count(int m, int n, int g) {
  if (m < 1 || n < 1 || g < 1) {
    throw ShapeError("tcl_param_count: dimensions must be positive, got m=" + std::to_string(m) +
                     " n=" + std::to_string(n) + " g=" + std::to_string(g));
  }
  const long long mm = m, nn = n, gg = g;
  return 2 * mm * nn + gg * mm + gg * nn;
}

FfAttParams FfAttParams::init(int g, int a, Rng& rng) {
  if (g < 1 || a < 1) {
    throw ShapeError("ffatt: dimensions must be positive, got g=" + std::to_string(g) +
                     " a=" + std::to_string(a));
  }
  FfAttParams p;
  p.g = g;
  p.a = a;
  p.W = rng_fill(rng, g, a, Dist::glorot(g, a));
  p.b = Matrix(1, a);
  p.w = rng_fill(rng, a, 1, Dist::glorot(a, 1));
  return p;
}

FfAttOut ffatt_forward(const Matrix& H, const FfAttParams& p, FfAttCache* cache) {
  if (H.cols() != p.g) {
    throw ShapeError("ffatt_forward: H " + H.shape_str() + " vs layer g=" + std::to_string(p.g));
  }
  const int n = H.rows();
  Matrix Zs = add_row_broadcast(matmul(H, p.W), p.b);  // n x a
  Matrix Us = Zs;
  for (double& v : Us.data()) v = std::tanh(v);
  Matrix scores(1, n);
  for (int i = 0; i < n; ++i) {
    double e = 0.0;
    for (int j = 0; j < p.a; ++j) e += Us.at(i, j) * p.w.at(j, 0);
    scores.at(0, i) = e;
  }
  Matrix alpha = row_softmax(scores);
  Matrix c = matmul(alpha, H);

  if (cache) {
    cache->H = H;
    cache->Zs = std::move(Zs);
    cache->Us = std::move(Us);
    cache->scores = std::move(scores);
    cache->alpha = alpha;
  }
  return {std::move(c), std::move(alpha)};
}

Matrix ffatt_backward(const Matrix& dc, const FfAttParams& p, const FfAttCache& cache,
                      FfAttGrads* grads, const Matrix* dalpha_extra) {
  if (dc.rows() != 1 || dc.cols() != p.g) {
    throw ShapeError("ffatt_backward: dc " + dc.shape_str() + " vs layer g=" +
                     std::to_string(p.g));
  }
  if (cache.H.cols() != p.g || cache.alpha.cols() != cache.H.rows()) {
    throw ShapeError("ffatt_backward: cache does not match layer dimensions");
  }

  Matrix dalpha = matmul(dc, transpose(cache.H));  // 1 x n
  if (dalpha_extra) dalpha = add(dalpha, *dalpha_extra);
  Matrix dH = matmul(transpose(cache.alpha), dc);  // n x g, value path

  Matrix dscores = row_softmax_vjp(cache.alpha, dalpha);  // 1 x n
  Matrix dUs = matmul(transpose(dscores), transpose(p.w));  // n x a
  Matrix dZs = dUs;
  for (int i = 0; i < dZs.size(); ++i) {
    const double u = cache.Us.data()[i];
    dZs.data()[i] *= 1.0 - u * u;
  }

  if (grads) {
    grads->dw = matmul(transpose(cache.Us), transpose(dscores));  // a x 1
    grads->dW = matmul(transpose(cache.H), dZs);
    grads->db = col_sums(dZs);
  }
  return add(dH, matmul(dZs, transpose(p.W)));
}

}  // namespace tca
