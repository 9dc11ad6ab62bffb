#include "tca/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "tca/error.hpp"
#include "tca/textio.hpp"

namespace tca {

std::string loss_kind_name(LossKind k) {
  return k == LossKind::Mse ? "mse" : "cross_entropy";
}

LossKind loss_kind_from_name(const std::string& name) {
  if (name == "mse") return LossKind::Mse;
  if (name == "cross_entropy") return LossKind::CrossEntropy;
  throw ConfigError("unknown loss '" + name + "'");
}

std::string optimizer_kind_name(OptimizerKind k) {
  return k == OptimizerKind::Sgd ? "sgd" : "adam";
}

OptimizerKind optimizer_kind_from_name(const std::string& name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer '" + name + "'");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (sparsity_lambda < 0.0) throw ConfigError("sparsity_lambda must be >= 0");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation_fraction must be in (0, 1)");
  }
  if (early_stop_enabled && early_stop_patience < 1) {
    throw ConfigError("early_stop_patience must be >= 1");
  }
}

std::vector<double> TrainHistory::val_losses() const {
  std::vector<double> out;
  out.reserve(epochs.size());
  for (const EpochRecord& e : epochs) out.push_back(e.val_loss);
  return out;
}

LossResult mse_loss(const Matrix& yhat, const Matrix& y) {
  if (!yhat.same_shape(y)) {
    throw ShapeError("mse_loss: " + yhat.shape_str() + " vs " + y.shape_str());
  }
  const double inv_count = 1.0 / yhat.size();
  LossResult res;
  res.grad = Matrix(yhat.rows(), yhat.cols());
  double sum = 0.0;
  for (int i = 0; i < yhat.size(); ++i) {
    const double d = yhat.data()[i] - y.data()[i];
    sum += d * d;
    res.grad.data()[i] = 2.0 * d * inv_count;
  }
  res.loss = sum * inv_count;
  return res;
}

LossResult cross_entropy_loss(const Matrix& probs, int label) {
  if (probs.rows() != 1) {
    throw ShapeError("cross_entropy_loss: probs must be 1xK, got " + probs.shape_str());
  }
  if (label < 0 || label >= probs.cols()) {
    throw Error("cross_entropy_loss: label " + std::to_string(label) + " out of range [0, " +
                std::to_string(probs.cols()) + ")");
  }
  LossResult res;
  res.loss = -std::log(probs.at(0, label));
  res.grad = probs;  // fused gradient w.r.t. logits: probs - onehot(label)
  res.grad.at(0, label) -= 1.0;
  return res;
}

PenaltyResult sparsity_penalty(const Matrix& A, double lambda) {
  PenaltyResult res;
  res.dA = Matrix(A.rows(), A.cols());
  double sum_sq = 0.0;
  for (double v : A.data()) sum_sq += v * v;
  const double inv_m = 1.0 / A.rows();
  res.penalty = -lambda * sum_sq * inv_m;
  const double coef = -2.0 * lambda * inv_m;
  for (int i = 0; i < A.size(); ++i) res.dA.data()[i] = coef * A.data()[i];
  return res;
}

void optimizer_step(std::vector<ParamRef>& params, const GradMap& grads, OptimizerState& state,
                    const TrainConfig& cfg) {
  if (cfg.optimizer == OptimizerKind::Sgd) {
    for (ParamRef& p : params) {
      auto it = grads.find(p.name);
      if (it == grads.end()) throw Error("optimizer_step: no gradient for '" + p.name + "'");
      if (!it->second.same_shape(*p.value)) {
        throw ShapeError("optimizer_step: gradient for '" + p.name + "' is " +
                         it->second.shape_str() + ", parameter is " + p.value->shape_str());
      }
      for (int i = 0; i < p.value->size(); ++i) {
        p.value->data()[i] -= cfg.learning_rate * it->second.data()[i];
      }
    }
    return;
  }

  state.t += 1;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (ParamRef& p : params) {
    auto it = grads.find(p.name);
    if (it == grads.end()) throw Error("optimizer_step: no gradient for '" + p.name + "'");
    const Matrix& g = it->second;
    if (!g.same_shape(*p.value)) {
      throw ShapeError("optimizer_step: gradient for '" + p.name + "' is " + g.shape_str() +
                       ", parameter is " + p.value->shape_str());
    }
    Matrix& m = state.m.try_emplace(p.name, Matrix(g.rows(), g.cols())).first->second;
    Matrix& v = state.v.try_emplace(p.name, Matrix(g.rows(), g.cols())).first->second;
    for (int i = 0; i < g.size(); ++i) {
      const double gi = g.data()[i];
      m.data()[i] = b1 * m.data()[i] + (1.0 - b1) * gi;
      v.data()[i] = b2 * v.data()[i] + (1.0 - b2) * gi * gi;
      const double m_hat = m.data()[i] / bc1;
      const double v_hat = v.data()[i] / bc2;
      p.value->data()[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
  }
}

bool early_stop_check(const std::vector<double>& val_losses, double min_delta, int patience) {
  const int count = static_cast<int>(val_losses.size());
  if (count < patience + 1) return false;  // first epoch only sets the baseline
  double best = val_losses[0];
  // improvements[e] = best-before-epoch-e minus loss at e, for e >= 1
  int consecutive_small = 0;
  for (int e = 1; e < count; ++e) {
    const double improvement = best - val_losses[e];
    if (improvement < min_delta) {
      ++consecutive_small;
    } else {
      consecutive_small = 0;
    }
    best = std::min(best, val_losses[e]);
  }
  return consecutive_small >= patience;
}

namespace {

struct SeqEval {
  double task_loss = 0.0;
  double objective = 0.0;  // task loss plus penalty
};

// Forward + loss for one sequence; fills grads when requested.
SeqEval eval_sequence(const Model& model, const SequenceDataset& data, std::size_t idx,
                      const TrainConfig& cfg, GradMap* grads_out) {
  const std::vector<bool>* mask =
      model.config.mask_enabled ? &data.masks[idx] : nullptr;
  ModelCache cache;
  ModelOut out = model_forward(model, data.inputs[idx], grads_out ? &cache : nullptr, mask);

  LossResult loss;
  if (model.config.kind == ModelKind::Classifier) {
    loss = cross_entropy_loss(out.Y, data.labels[idx]);
  } else {
    loss = mse_loss(out.Y, data.targets[idx]);
  }

  SeqEval ev;
  ev.task_loss = loss.loss;
  ev.objective = loss.loss;
  if (cfg.sparsity_lambda > 0.0) {
    PenaltyResult pen = sparsity_penalty(out.A, cfg.sparsity_lambda);
    ev.objective += pen.penalty;
    if (grads_out) *grads_out = model_backward(model, loss.grad, cache, &pen.dA);
  } else if (grads_out) {
    *grads_out = model_backward(model, loss.grad, cache);
  }
  return ev;
}

void accumulate(GradMap& into, const GradMap& from) {
  for (const auto& [name, g] : from) {
    auto it = into.find(name);
    if (it == into.end()) {
      into.emplace(name, g);
    } else {
      it->second = add(it->second, g);
    }
  }
}

}  // namespace

TrainResult train(Model model, const SequenceDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.size() == 0) throw DataError("train: empty dataset");
  if (data.size() < 2) throw DataError("train: need at least 2 sequences for a validation split");
  const bool classifier = model.config.kind == ModelKind::Classifier;
  if (classifier && !data.is_classification()) {
    throw DataError("train: classifier model needs a labelled dataset");
  }
  if (!classifier && data.targets.size() != data.size()) {
    throw DataError("train: autoencoder model needs target sequences");
  }
  if ((cfg.loss == LossKind::CrossEntropy) != classifier) {
    throw ConfigError("train: loss '" + loss_kind_name(cfg.loss) + "' does not match model kind '" +
                      model_kind_name(model.config.kind) + "'");
  }

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(static_cast<int>(i + 1))]);
  }
  std::size_t val_count = static_cast<std::size_t>(
      std::llround(cfg.validation_fraction * static_cast<double>(data.size())));
  val_count = std::max<std::size_t>(1, std::min(val_count, data.size() - 1));
  std::vector<std::size_t> train_idx(order.begin(), order.end() - val_count);
  std::vector<std::size_t> val_idx(order.end() - val_count, order.end());

  std::vector<ParamRef> params = model.registry();
  OptimizerState opt_state;
  TrainHistory history;

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Matrix> best_params;
  for (const ParamRef& p : params) best_params.push_back(*p.value);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();

    for (std::size_t i = train_idx.size() - 1; i > 0; --i) {
      std::swap(train_idx[i], train_idx[rng.below(static_cast<int>(i + 1))]);
    }

    double epoch_objective = 0.0;
    for (std::size_t b = 0; b < train_idx.size(); b += cfg.batch_size) {
      const std::size_t batch_end = std::min(b + cfg.batch_size, train_idx.size());
      GradMap batch_grads;
      for (std::size_t k = b; k < batch_end; ++k) {
        GradMap seq_grads;
        SeqEval ev = eval_sequence(model, data, train_idx[k], cfg, &seq_grads);
        if (!std::isfinite(ev.objective)) {
          throw Error("train: non-finite loss at epoch " + std::to_string(epoch) +
                      ", sequence " + std::to_string(train_idx[k]));
        }
        epoch_objective += ev.objective;
        accumulate(batch_grads, seq_grads);
      }
      const double inv_batch = 1.0 / static_cast<double>(batch_end - b);
      for (auto& [name, g] : batch_grads) g = scale(g, inv_batch);
      optimizer_step(params, batch_grads, opt_state, cfg);
    }

    double val_loss = 0.0;
    for (std::size_t idx : val_idx) {
      val_loss += eval_sequence(model, data, idx, cfg, nullptr).objective;
    }
    val_loss /= static_cast<double>(val_idx.size());
    if (!std::isfinite(val_loss)) {
      throw Error("train: non-finite validation loss at epoch " + std::to_string(epoch));
    }

    if (val_loss < best_val) {
      best_val = val_loss;
      for (std::size_t i = 0; i < params.size(); ++i) best_params[i] = *params[i].value;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_objective / static_cast<double>(train_idx.size());
    rec.val_loss = val_loss;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    history.epochs.push_back(rec);

    if (cfg.early_stop_enabled &&
        early_stop_check(history.val_losses(), cfg.early_stop_min_delta,
                         cfg.early_stop_patience)) {
      break;
    }
  }

  for (std::size_t i = 0; i < params.size(); ++i) *params[i].value = best_params[i];
  return {std::move(model), std::move(history)};
}

void export_history_csv(const TrainHistory& history, const std::string& path,
                        bool include_timing) {
  std::string out = "epoch,train_loss,val_loss,seconds\n";
  for (const EpochRecord& e : history.epochs) {
    out += std::to_string(e.epoch);
    out += ',';
    out += format_g17(e.train_loss);
    out += ',';
    out += format_g17(e.val_loss);
    out += ',';
    out += include_timing ? format_g17(e.seconds) : "0";
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace tca
