#include "tca/model.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "tca/error.hpp"
#include "tca/textio.hpp"

namespace tca {

std::string model_kind_name(ModelKind k) {
  return k == ModelKind::Autoencoder ? "autoencoder" : "classifier";
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "autoencoder") return ModelKind::Autoencoder;
  if (name == "classifier") return ModelKind::Classifier;
  throw ConfigError("unknown model kind '" + name + "'");
}

std::string attention_kind_name(AttentionKind k) {
  return k == AttentionKind::Contextual ? "contextual" : "feedforward";
}

AttentionKind attention_kind_from_name(const std::string& name) {
  if (name == "contextual") return AttentionKind::Contextual;
  if (name == "feedforward") return AttentionKind::FeedForward;
  throw ConfigError("unknown attention kind '" + name + "'");
}

void ModelConfig::validate() const {
  if (n < 1 || f < 1 || g < 1) {
    throw ConfigError("model config: n, f, g must all be >= 1");
  }
  if (kind == ModelKind::Classifier) {
    if (m != 1) throw ConfigError("classifier requires m == 1");
    if (num_classes < 2) throw ConfigError("classifier requires num_classes >= 2");
  } else {
    if (m < 1) throw ConfigError("autoencoder requires m >= 1");
  }
  if (attention == AttentionKind::FeedForward && m != 1) {
    throw ConfigError("feedforward attention produces a single context vector; requires m == 1");
  }
  if (ffatt_hidden < 0) throw ConfigError("ffatt_hidden must be >= 0");
}

Model Model::init(const ModelConfig& config, Rng& rng) {
  config.validate();
  Model model;
  model.config = config;
  model.encoder = DenseParams::init(config.f, config.g, rng);
  if (config.attention == AttentionKind::Contextual) {
    model.tcl = TclParams::init(config.m, config.n, config.g, rng);
  } else {
    const int a = config.ffatt_hidden > 0 ? config.ffatt_hidden : config.g;
    model.ffatt = FfAttParams::init(config.g, a, rng);
  }
  const int head_out = config.kind == ModelKind::Classifier ? config.num_classes : config.f;
  model.head = DenseParams::init(config.g, head_out, rng);
  return model;
}

std::vector<ParamRef> Model::registry() {
  std::vector<ParamRef> refs;
  refs.push_back({"encoder.W", &encoder.W});
  refs.push_back({"encoder.b", &encoder.b});
  if (config.attention == AttentionKind::Contextual) {
    refs.push_back({"tcl.U", &tcl.U});
    refs.push_back({"tcl.P", &tcl.P});
    refs.push_back({"tcl.V", &tcl.V});
    refs.push_back({"tcl.Q", &tcl.Q});
  } else {
    refs.push_back({"ffatt.W", &ffatt.W});
    refs.push_back({"ffatt.b", &ffatt.b});
    refs.push_back({"ffatt.w", &ffatt.w});
  }
  refs.push_back({"head.W", &head.W});
  refs.push_back({"head.b", &head.b});
  return refs;
}

std::vector<std::pair<std::string, const Matrix*>> Model::registry() const {
  std::vector<std::pair<std::string, const Matrix*>> refs;
  for (const ParamRef& r : const_cast<Model*>(this)->registry()) {
    refs.emplace_back(r.name, r.value);
  }
  return refs;
}

long long Model::param_count() const {
  long long total = 0;
  for (const auto& [name, value] : registry()) total += value->size();
  return total;
}

ModelOut model_forward(const Model& model, const Matrix& X, ModelCache* cache,
                       const std::vector<bool>* mask) {
  const ModelConfig& cfg = model.config;
  if (X.rows() != cfg.n || X.cols() != cfg.f) {
    throw ShapeError("model_forward: input " + X.shape_str() + " vs config n=" +
                     std::to_string(cfg.n) + " f=" + std::to_string(cfg.f));
  }
  DenseCache enc_cache;
  Matrix H = dense_forward(X, model.encoder, cfg.encoder_activation,
                           cache ? &cache->encoder : &enc_cache);

  Matrix C, A;
  if (cfg.attention == AttentionKind::Contextual) {
    TclCache local;
    TclOut out = tcl_forward(H, model.tcl, cache ? &cache->tcl : &local,
                             cfg.mask_enabled ? mask : nullptr);
    C = std::move(out.C);
    A = std::move(out.A);
  } else {
    FfAttCache local;
    FfAttOut out = ffatt_forward(H, model.ffatt, cache ? &cache->ffatt : &local);
    C = std::move(out.c);
    A = std::move(out.alpha);
  }

  const Activation head_act =
      cfg.kind == ModelKind::Classifier ? Activation::SoftmaxRows : cfg.decoder_activation;
  DenseCache head_cache;
  Matrix Y = dense_forward(C, model.head, head_act, cache ? &cache->head : &head_cache);
  return {std::move(Y), std::move(A)};
}

GradMap model_backward(const Model& model, const Matrix& dOut, const ModelCache& cache,
                       const Matrix* dA_extra) {
  const ModelConfig& cfg = model.config;
  GradMap grads;

  DenseGrads head_grads;
  Matrix dC;
  if (cfg.kind == ModelKind::Classifier) {
    // dOut is the gradient w.r.t. the pre-softmax logits.
    dC = dense_backward_from_preact(dOut, model.head, cache.head, &head_grads);
  } else {
    dC = dense_backward(dOut, model.head, cache.head, &head_grads);
  }
  grads["head.W"] = std::move(head_grads.dW);
  grads["head.b"] = std::move(head_grads.db);

  Matrix dH;
  if (cfg.attention == AttentionKind::Contextual) {
    TclGrads tcl_grads;
    dH = tcl_backward(dC, model.tcl, cache.tcl, &tcl_grads, dA_extra);
    grads["tcl.U"] = std::move(tcl_grads.dU);
    grads["tcl.P"] = std::move(tcl_grads.dP);
    grads["tcl.V"] = std::move(tcl_grads.dV);
    grads["tcl.Q"] = std::move(tcl_grads.dQ);
  } else {
    FfAttGrads ff_grads;
    dH = ffatt_backward(dC, model.ffatt, cache.ffatt, &ff_grads, dA_extra);
    grads["ffatt.W"] = std::move(ff_grads.dW);
    grads["ffatt.b"] = std::move(ff_grads.db);
    grads["ffatt.w"] = std::move(ff_grads.dw);
  }

  DenseGrads enc_grads;
  dense_backward(dH, model.encoder, cache.encoder, &enc_grads);
  grads["encoder.W"] = std::move(enc_grads.dW);
  grads["encoder.b"] = std::move(enc_grads.db);
  return grads;
}

namespace {

void append_matrix_json(std::string& out, const Matrix& m) {
  out += '[';
  for (int i = 0; i < m.rows(); ++i) {
    if (i) out += ',';
    out += '[';
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_g17(m.at(i, j));
    }
    out += ']';
  }
  out += ']';
}

Matrix matrix_from_json(const nlohmann::json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw DataError("checkpoint: parameter '" + name + "' is not a 2-d array");
  }
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(rows) * cols);
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw DataError("checkpoint: ragged rows in parameter '" + name + "'");
    }
    for (const auto& cell : row) {
      if (!cell.is_number()) {
        throw DataError("checkpoint: non-numeric entry in parameter '" + name + "'");
      }
      const double v = cell.get<double>();
      if (!std::isfinite(v)) {
        throw DataError("checkpoint: non-finite entry in parameter '" + name + "'");
      }
      data.push_back(v);
    }
  }
  return Matrix(rows, cols, std::move(data));
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
  const ModelConfig& cfg = model.config;
  std::string out = "{\n";
  out += "  \"format_version\": 1,\n";
  out += "  \"config\": {\n";
  out += "    \"kind\": \"" + model_kind_name(cfg.kind) + "\",\n";
  out += "    \"n\": " + std::to_string(cfg.n) + ",\n";
  out += "    \"m\": " + std::to_string(cfg.m) + ",\n";
  out += "    \"f\": " + std::to_string(cfg.f) + ",\n";
  out += "    \"g\": " + std::to_string(cfg.g) + ",\n";
  out += "    \"num_classes\": " + std::to_string(cfg.num_classes) + ",\n";
  out += "    \"encoder_activation\": \"" + activation_name(cfg.encoder_activation) + "\",\n";
  out += "    \"decoder_activation\": \"" + activation_name(cfg.decoder_activation) + "\",\n";
  out += std::string("    \"mask_enabled\": ") + (cfg.mask_enabled ? "true" : "false") + ",\n";
  out += "    \"attention\": \"" + attention_kind_name(cfg.attention) + "\",\n";
  out += "    \"ffatt_hidden\": " + std::to_string(cfg.ffatt_hidden) + "\n";
  out += "  },\n";
  out += "  \"params\": {\n";
  const auto refs = model.registry();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    out += "    \"" + refs[i].first + "\": ";
    append_matrix_json(out, *refs[i].second);
    out += i + 1 < refs.size() ? ",\n" : "\n";
  }
  out += "  }\n";
  out += "}\n";
  write_text_file(path, out);
}

Model load_model(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint " + path + ": malformed JSON: " + e.what());
  }

  if (!doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
    throw DataError("checkpoint " + path + ": missing format_version");
  }
  if (doc["format_version"].get<int>() != 1) {
    throw DataError("checkpoint " + path + ": unsupported format_version " +
                    doc["format_version"].dump());
  }
  if (!doc.contains("config") || !doc.contains("params")) {
    throw DataError("checkpoint " + path + ": missing config or params");
  }

  const nlohmann::json& jc = doc["config"];
  ModelConfig cfg;
  try {
    cfg.kind = model_kind_from_name(jc.at("kind").get<std::string>());
    cfg.n = jc.at("n").get<int>();
    cfg.m = jc.at("m").get<int>();
    cfg.f = jc.at("f").get<int>();
    cfg.g = jc.at("g").get<int>();
    cfg.num_classes = jc.at("num_classes").get<int>();
    cfg.encoder_activation = activation_from_name(jc.at("encoder_activation").get<std::string>());
    cfg.decoder_activation = activation_from_name(jc.at("decoder_activation").get<std::string>());
    cfg.mask_enabled = jc.at("mask_enabled").get<bool>();
    cfg.attention = attention_kind_from_name(jc.at("attention").get<std::string>());
    cfg.ffatt_hidden = jc.at("ffatt_hidden").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint " + path + ": bad config: " + e.what());
  }
  cfg.validate();

  Rng rng(0);
  Model model = Model::init(cfg, rng);
  const nlohmann::json& jp = doc["params"];
  for (ParamRef ref : model.registry()) {
    if (!jp.contains(ref.name)) {
      throw DataError("checkpoint " + path + ": missing parameter '" + ref.name + "'");
    }
    Matrix loaded = matrix_from_json(jp[ref.name], ref.name);
    if (!loaded.same_shape(*ref.value)) {
      throw DataError("checkpoint " + path + ": parameter '" + ref.name + "' has shape " +
                      loaded.shape_str() + ", config implies " + ref.value->shape_str());
    }
    *ref.value = std::move(loaded);
  }
  for (const auto& [name, value] : jp.items()) {
    bool known = false;
    for (const auto& [rname, _] : std::as_const(model).registry()) known = known || rname == name;
    if (!known) throw DataError("checkpoint " + path + ": unexpected parameter '" + name + "'");
  }
  return model;
}

}  // namespace tca
