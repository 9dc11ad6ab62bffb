#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tca/dataset.hpp"
#include "tca/model.hpp"

namespace tca {

enum class LossKind { Mse, CrossEntropy };
enum class OptimizerKind { Sgd, Adam };

std::string loss_kind_name(LossKind k);
LossKind loss_kind_from_name(const std::string& name);
std::string optimizer_kind_name(OptimizerKind k);
OptimizerKind optimizer_kind_from_name(const std::string& name);

struct TrainConfig {
  int batch_size = 8;
  int max_epochs = 50;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  LossKind loss = LossKind::Mse;
  double sparsity_lambda = 0.0;
  bool early_stop_enabled = false;
  double early_stop_min_delta = 0.01;
  int early_stop_patience = 10;
  std::uint64_t seed = 0;
  double validation_fraction = 0.1;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // objective including the sparsity penalty
  double val_loss = 0.0;    // validation objective (task loss plus penalty)
  double seconds = 0.0;     // wall time; not part of reproducible artifacts
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::vector<double> val_losses() const;
};

struct LossResult {
  double loss = 0.0;
  Matrix grad;
};

// Mean over all elements of (yhat - y)^2; grad is 2*(yhat - y)/count.
LossResult mse_loss(const Matrix& yhat, const Matrix& y);

// loss = -ln probs[label]. The returned gradient is w.r.t. the pre-softmax
// logits (probs - onehot), the numerically exact fused form.
LossResult cross_entropy_loss(const Matrix& probs, int label);

struct PenaltyResult {
  double penalty = 0.0;
  Matrix dA;
};

// Negative L2 activity regulariser on attention rows, averaged over rows:
//   penalty = -lambda * sum_r sum_i A[r][i]^2 / m.
// For a row-stochastic A each row term lies in [-lambda, -lambda/n]; the
// minimum -lambda is attained exactly when the row is one-hot, so the term
// rewards a single attention spike.
PenaltyResult sparsity_penalty(const Matrix& A, double lambda);

// Adam moment buffers, keyed like the registry. Empty until the first step.
struct OptimizerState {
  std::map<std::string, Matrix> m;
  std::map<std::string, Matrix> v;
  long long t = 0;
};

void optimizer_step(std::vector<ParamRef>& params, const GradMap& grads, OptimizerState& state,
                    const TrainConfig& cfg);

// True iff the most recent `patience` epochs each improved the best
// validation loss seen before them by strictly less than min_delta. The
// first epoch establishes the baseline and never counts as a small
// improvement.
bool early_stop_check(const std::vector<double>& val_losses, double min_delta, int patience);

struct TrainResult {
  Model model;  // parameters from the best-validation epoch
  TrainHistory history;
};

// Deterministic mini-batch training: the split and all shuffles come from
// cfg.seed, gradients are accumulated in sequence order within a batch, and
// the returned model carries the best-validation parameters.
TrainResult train(Model model, const SequenceDataset& data, const TrainConfig& cfg);

// CSV "epoch,train_loss,val_loss,seconds". Timing is wall-clock noise, so
// it is written as 0 unless include_timing is set; artifacts stay byte
// reproducible.
void export_history_csv(const TrainHistory& history, const std::string& path,
                        bool include_timing = false);

}  // namespace tca
