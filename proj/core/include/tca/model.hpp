#pragma once

#include <string>
#include <vector>

#include "tca/contextual.hpp"
#include "tca/gradcheck.hpp"
#include "tca/layers.hpp"

namespace tca {

enum class ModelKind { Autoencoder, Classifier };
enum class AttentionKind { Contextual, FeedForward };

std::string model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);
std::string attention_kind_name(AttentionKind k);
AttentionKind attention_kind_from_name(const std::string& name);

struct ModelConfig {
  ModelKind kind = ModelKind::Autoencoder;
  int n = 0;            // input sequence length
  int m = 0;            // output sequence length; classifiers force m = 1
  int f = 0;            // raw feature width
  int g = 0;            // latent width
  int num_classes = 0;  // classifier only
  Activation encoder_activation = Activation::Tanh;
  Activation decoder_activation = Activation::Linear;
  bool mask_enabled = false;
  AttentionKind attention = AttentionKind::Contextual;
  int ffatt_hidden = 0;  // 0 means g

  void validate() const;  // ConfigError on inconsistent dimensions
};

// Encoder (time-distributed dense f->g), attention layer (n->m over width
// g), head (time-distributed dense g->f for the autoencoder, dense g->K
// with row softmax for the classifier).
struct Model {
  ModelConfig config;
  DenseParams encoder;
  TclParams tcl;
  FfAttParams ffatt;  // used when config.attention == FeedForward
  DenseParams head;

  static Model init(const ModelConfig& config, Rng& rng);

  // Flat registry over every trainable matrix, fixed order:
  // encoder.W, encoder.b, attention params, head.W, head.b.
  std::vector<ParamRef> registry();
  std::vector<std::pair<std::string, const Matrix*>> registry() const;
  long long param_count() const;
};

struct ModelCache {
  DenseCache encoder;
  TclCache tcl;
  FfAttCache ffatt;
  DenseCache head;
};

struct ModelOut {
  Matrix Y;  // m x f reconstruction, or 1 x num_classes probabilities
  Matrix A;  // m x n attention matrix
};

ModelOut model_forward(const Model& model, const Matrix& X, ModelCache* cache = nullptr,
                       const std::vector<bool>* mask = nullptr);

// dOut is the gradient w.r.t. Y for the autoencoder, and w.r.t. the head
// pre-softmax logits for the classifier (the fused cross-entropy path).
// dA_extra, when given, is added to the attention-matrix gradient (the
// sparsity regulariser enters here). Returns gradients for every registry
// entry.
GradMap model_backward(const Model& model, const Matrix& dOut, const ModelCache& cache,
                       const Matrix* dA_extra = nullptr);

// Checkpoint: one JSON document
//   {"format_version":1, "config":{...}, "params":{name:[[...]], ...}}
// with every value printed to 17 significant digits, so a save/load round
// trip reproduces parameters bit for bit.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace tca
