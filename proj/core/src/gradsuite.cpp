#include "tca/gradsuite.hpp"

#include <cmath>
#include <functional>

#include "tca/contextual.hpp"
#include "tca/gradcheck.hpp"
#include "tca/layers.hpp"
#include "tca/model.hpp"
#include "tca/train.hpp"

namespace tca {

namespace {

bool near_relu_kink(const Matrix& preact, double tol) {
  for (double z : preact.data()) {
    if (std::fabs(z) < tol) return true;
  }
  return false;
}

// A scorer weight w_j multiplies every gradient flowing into column j of
// the attention scorer. When |w_j| is almost zero those true gradients sit
// below what central differences can resolve against the 1e-8 relative
// floor, so such draws are resampled like relu kinks.
bool near_zero_gate(const Matrix& w, double tol) {
  for (double v : w.data()) {
    if (std::fabs(v) < tol) return true;
  }
  return false;
}

double dense_objective(Matrix& x, DenseParams& p, Activation act, const Matrix& target,
                       GradMap* grads) {
  DenseCache cache;
  Matrix y = dense_forward(x, p, act, &cache);
  LossResult loss = mse_loss(y, target);
  if (grads) {
    DenseGrads dg;
    Matrix dx = dense_backward(loss.grad, p, cache, &dg);
    (*grads)["W"] = dg.dW;
    (*grads)["b"] = dg.db;
    (*grads)["X"] = dx;
  }
  return loss.loss;
}

GradSuiteResult check_dense(Activation act, Rng& rng) {
  for (;;) {
    Matrix x = rng_fill(rng, 4, 3, Dist::uniform(-1, 1));
    DenseParams p = DenseParams::init(3, 5, rng);
    p.b = rng_fill(rng, 1, 5, Dist::uniform(-0.3, 0.3));
    Matrix target = rng_fill(rng, 4, 5, Dist::uniform(-1, 1));
    if (act == Activation::Relu) {
      DenseCache cache;
      dense_forward(x, p, act, &cache);
      if (near_relu_kink(cache.Z, 1e-4)) continue;
    }
    GradMap analytic;
    dense_objective(x, p, act, target, &analytic);
    std::vector<ParamRef> params = {{"W", &p.W}, {"b", &p.b}, {"X", &x}};
    auto loss = [&] { return dense_objective(x, p, act, target, nullptr); };
    return {"dense_" + activation_name(act), grad_check(params, loss, analytic)};
  }
}

double tcl_objective(Matrix& h, TclParams& p, const Matrix& target, GradMap* grads) {
  TclCache cache;
  TclOut out = tcl_forward(h, p, &cache);
  LossResult loss = mse_loss(out.C, target);
  if (grads) {
    TclGrads tg;
    Matrix dh = tcl_backward(loss.grad, p, cache, &tg);
    (*grads)["U"] = tg.dU;
    (*grads)["P"] = tg.dP;
    (*grads)["V"] = tg.dV;
    (*grads)["Q"] = tg.dQ;
    (*grads)["H"] = dh;
  }
  return loss.loss;
}

GradSuiteResult check_tcl(Rng& rng) {
  for (;;) {
    const int n = 5, g = 3, m = 4;
    Matrix h = rng_fill(rng, n, g, Dist::uniform(-1, 1));
    TclParams p = TclParams::init(m, n, g, rng);
    p.P = rng_fill(rng, m, g, Dist::uniform(-0.5, 0.5));
    p.Q = rng_fill(rng, m, n, Dist::uniform(-0.5, 0.5));
    Matrix target = rng_fill(rng, m, g, Dist::uniform(-1, 1));

    TclCache cache;
    tcl_forward(h, p, &cache);
    if (near_relu_kink(cache.Z2, 1e-4)) continue;

    GradMap analytic;
    tcl_objective(h, p, target, &analytic);
    std::vector<ParamRef> params = {
        {"U", &p.U}, {"P", &p.P}, {"V", &p.V}, {"Q", &p.Q}, {"H", &h}};
    auto loss = [&] { return tcl_objective(h, p, target, nullptr); };
    return {"tcl", grad_check(params, loss, analytic)};
  }
}

double ffatt_objective(Matrix& h, FfAttParams& p, const Matrix& target, GradMap* grads) {
  FfAttCache cache;
  FfAttOut out = ffatt_forward(h, p, &cache);
  LossResult loss = mse_loss(out.c, target);
  if (grads) {
    FfAttGrads fg;
    Matrix dh = ffatt_backward(loss.grad, p, cache, &fg);
    (*grads)["W"] = fg.dW;
    (*grads)["b"] = fg.db;
    (*grads)["w"] = fg.dw;
    (*grads)["H"] = dh;
  }
  return loss.loss;
}

GradSuiteResult check_ffatt(Rng& rng) {
  const int n = 5, g = 3, a = 4;
  Matrix h = rng_fill(rng, n, g, Dist::uniform(-1, 1));
  FfAttParams p = FfAttParams::init(g, a, rng);
  while (near_zero_gate(p.w, 1e-3)) p.w = rng_fill(rng, a, 1, Dist::glorot(a, 1));
  p.b = rng_fill(rng, 1, a, Dist::uniform(-0.3, 0.3));
  Matrix target = rng_fill(rng, 1, g, Dist::uniform(-1, 1));

  GradMap analytic;
  ffatt_objective(h, p, target, &analytic);
  std::vector<ParamRef> params = {{"W", &p.W}, {"b", &p.b}, {"w", &p.w}, {"H", &h}};
  auto loss = [&] { return ffatt_objective(h, p, target, nullptr); };
  return {"ffatt", grad_check(params, loss, analytic)};
}

double model_objective(Model& model, const Matrix& x, const Matrix* target, int label,
                       double lambda, GradMap* grads) {
  ModelCache cache;
  ModelOut out = model_forward(model, x, grads ? &cache : nullptr);
  LossResult loss = model.config.kind == ModelKind::Classifier
                        ? cross_entropy_loss(out.Y, label)
                        : mse_loss(out.Y, *target);
  double total = loss.loss;
  if (lambda > 0.0) {
    PenaltyResult pen = sparsity_penalty(out.A, lambda);
    total += pen.penalty;
    if (grads) *grads = model_backward(model, loss.grad, cache, &pen.dA);
  } else if (grads) {
    *grads = model_backward(model, loss.grad, cache);
  }
  return total;
}

GradSuiteResult check_model(const std::string& name, ModelKind kind, AttentionKind attention,
                            double lambda, Rng& rng) {
  for (;;) {
    ModelConfig cfg;
    cfg.kind = kind;
    cfg.n = 5;
    cfg.m = kind == ModelKind::Classifier || attention == AttentionKind::FeedForward ? 1 : 5;
    cfg.f = 3;
    cfg.g = 2;
    cfg.num_classes = kind == ModelKind::Classifier ? 4 : 0;
    cfg.attention = attention;
    Model model = Model::init(cfg, rng);
    Matrix x = rng_fill(rng, cfg.n, cfg.f, Dist::uniform(-1, 1));
    Matrix target =
        kind == ModelKind::Classifier ? Matrix(1, 1) : rng_fill(rng, cfg.m, cfg.f, Dist::uniform(-1, 1));
    const int label = 2;

    if (attention == AttentionKind::Contextual) {
      ModelCache cache;
      model_forward(model, x, &cache);
      if (near_relu_kink(cache.tcl.Z2, 1e-4)) continue;
    } else if (near_zero_gate(model.ffatt.w, 1e-3)) {
      continue;
    }

    GradMap analytic;
    model_objective(model, x, kind == ModelKind::Classifier ? nullptr : &target, label, lambda,
                    &analytic);
    auto params = model.registry();
    auto loss = [&] {
      return model_objective(model, x, kind == ModelKind::Classifier ? nullptr : &target, label,
                             lambda, nullptr);
    };
    return {name, grad_check(params, loss, analytic)};
  }
}

GradSuiteResult check_mse(Rng& rng) {
  Matrix yhat = rng_fill(rng, 3, 4, Dist::uniform(-1, 1));
  Matrix y = rng_fill(rng, 3, 4, Dist::uniform(-1, 1));
  GradMap analytic;
  analytic["yhat"] = mse_loss(yhat, y).grad;
  std::vector<ParamRef> params = {{"yhat", &yhat}};
  auto loss = [&] { return mse_loss(yhat, y).loss; };
  return {"mse_loss", grad_check(params, loss, analytic)};
}

GradSuiteResult check_cross_entropy(Rng& rng) {
  Matrix logits = rng_fill(rng, 1, 5, Dist::uniform(-1, 1));
  const int label = 3;
  GradMap analytic;
  analytic["logits"] = cross_entropy_loss(row_softmax(logits), label).grad;
  std::vector<ParamRef> params = {{"logits", &logits}};
  auto loss = [&] { return cross_entropy_loss(row_softmax(logits), label).loss; };
  return {"cross_entropy_logits", grad_check(params, loss, analytic)};
}

GradSuiteResult check_sparsity(Rng& rng) {
  Matrix a = rng_fill(rng, 3, 5, Dist::uniform(0.01, 1.0));
  GradMap analytic;
  analytic["A"] = sparsity_penalty(a, 0.7).dA;
  std::vector<ParamRef> params = {{"A", &a}};
  auto loss = [&] { return sparsity_penalty(a, 0.7).penalty; };
  return {"sparsity_penalty", grad_check(params, loss, analytic)};
}

}  // namespace

std::vector<GradSuiteResult> run_gradient_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradSuiteResult> results;
  results.push_back(check_dense(Activation::Linear, rng));
  results.push_back(check_dense(Activation::Tanh, rng));
  results.push_back(check_dense(Activation::Relu, rng));
  results.push_back(check_dense(Activation::SoftmaxRows, rng));
  results.push_back(check_tcl(rng));
  results.push_back(check_ffatt(rng));
  results.push_back(check_mse(rng));
  results.push_back(check_cross_entropy(rng));
  results.push_back(check_sparsity(rng));
  results.push_back(check_model("autoencoder_mse", ModelKind::Autoencoder,
                                AttentionKind::Contextual, 0.0, rng));
  results.push_back(check_model("autoencoder_mse_sparsity", ModelKind::Autoencoder,
                                AttentionKind::Contextual, 0.01, rng));
  results.push_back(check_model("classifier_cross_entropy", ModelKind::Classifier,
                                AttentionKind::Contextual, 0.0, rng));
  results.push_back(check_model("classifier_cross_entropy_sparsity", ModelKind::Classifier,
                                AttentionKind::Contextual, 0.01, rng));
  results.push_back(check_model("autoencoder_ffatt_mse", ModelKind::Autoencoder,
                                AttentionKind::FeedForward, 0.01, rng));
  return results;
}

bool gradient_suite_passes(const std::vector<GradSuiteResult>& results, double threshold) {
  for (const GradSuiteResult& r : results) {
    if (!(r.max_rel_err < threshold)) return false;
  }
  return true;
}

}  // namespace tca
