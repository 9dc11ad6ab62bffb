#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <json.hpp>

#include "tca/dataset.hpp"
#include "tca/error.hpp"
#include "tca/gradsuite.hpp"
#include "tca/metrics.hpp"
#include "tca/model.hpp"
#include "tca/textio.hpp"
#include "tca/train.hpp"

namespace fs = std::filesystem;

namespace tca::cli {

namespace {

void write_resolved(const RunConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "resolved.cfg").string(), cfg.resolved_text());
}

const std::vector<bool>* mask_for(const Model& model, const SequenceDataset& data,
                                  std::size_t idx) {
  return model.config.mask_enabled ? &data.masks[idx] : nullptr;
}

std::vector<int> parse_horizons(const std::string& csv) {
  std::vector<int> out;
  std::string cur;
  for (char ch : csv + ",") {
    if (ch == ',') {
      if (!cur.empty()) {
        char* end = nullptr;
        const long v = std::strtol(cur.c_str(), &end, 10);
        if (end == cur.c_str() || *end != '\0') {
          throw ConfigError("horizons: '" + cur + "' is not an integer");
        }
        out.push_back(static_cast<int>(v));
        cur.clear();
      }
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  return out;
}

}  // namespace

int cmd_gen(const RunConfig& cfg) {
  const std::string task = cfg.get_string("task");
  const std::string out_dir = cfg.get_string("out");
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 0));
  const int count = cfg.get_int_or("count", 100);

  SequenceDataset ds;
  if (task == "interpolation") {
    ds = gen_interpolation(seed, count, cfg.get_int_or("n", 160), cfg.get_int_or("hole_len", 60),
                           cfg.get_int_or("hole_start", 50), cfg.get_int_or("f", 6));
  } else if (task == "extrapolation") {
    ds = gen_extrapolation(seed, count, cfg.get_int_or("prefix", 50),
                           cfg.get_int_or("horizon", 60), cfg.get_int_or("f", 6));
  } else if (task == "keyframe") {
    ds = gen_keyframe(seed, count, cfg.get_int_or("frames", 10), cfg.get_int_or("classes", 10),
                      cfg.get_int_or("f", 32), cfg.get_int_or("target_class", 2));
  } else if (task == "actions") {
    ds = gen_actions(seed, count, cfg.get_int_or("classes", 9), cfg.get_int_or("n", 64),
                     cfg.get_int_or("f", 16), cfg.get_int_or("motif_len", 12));
  } else {
    throw ConfigError("unknown task '" + task +
                      "' (expected interpolation|extrapolation|keyframe|actions)");
  }

  save_dataset(ds, out_dir);
  write_resolved(cfg, out_dir);
  std::cerr << "wrote " << ds.size() << " sequences to " << out_dir << "\n";
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  const std::string out_dir = cfg.get_string("out");
  SequenceDataset data = load_csv_dataset(cfg.get_string("data"));

  ModelConfig mcfg;
  const std::string kind = cfg.get_string_or("kind", "auto");
  if (kind == "auto") {
    mcfg.kind = data.is_classification() ? ModelKind::Classifier : ModelKind::Autoencoder;
  } else {
    mcfg.kind = model_kind_from_name(kind);
  }
  if (mcfg.kind == ModelKind::Classifier && !data.is_classification()) {
    throw ConfigError("classifier model needs a labelled dataset");
  }
  if (mcfg.kind == ModelKind::Autoencoder && data.is_classification()) {
    throw ConfigError("autoencoder model needs target sequences");
  }
  mcfg.n = data.n;
  mcfg.f = data.f;
  mcfg.g = cfg.get_int_or("g", 16);
  mcfg.attention = attention_kind_from_name(cfg.get_string_or("attention", "contextual"));
  mcfg.ffatt_hidden = cfg.get_int_or("ffatt_hidden", 0);
  mcfg.encoder_activation = activation_from_name(cfg.get_string_or("encoder_activation", "tanh"));
  mcfg.decoder_activation = activation_from_name(cfg.get_string_or("decoder_activation", "linear"));
  mcfg.mask_enabled = cfg.get_bool_or("mask", false);
  if (mcfg.kind == ModelKind::Classifier) {
    mcfg.m = 1;
    mcfg.num_classes = data.generator.contains("classes") ? data.generator["classes"].get<int>()
                                                          : data.num_classes();
  } else {
    mcfg.m = data.m;
  }
  mcfg.validate();

  TrainConfig tcfg;
  tcfg.batch_size = cfg.get_int_or("batch_size", 8);
  tcfg.max_epochs = cfg.get_int_or("max_epochs", 50);
  tcfg.learning_rate = cfg.get_double_or("learning_rate", 1e-3);
  tcfg.optimizer = optimizer_kind_from_name(cfg.get_string_or("optimizer", "adam"));
  tcfg.adam_beta1 = cfg.get_double_or("adam_beta1", 0.9);
  tcfg.adam_beta2 = cfg.get_double_or("adam_beta2", 0.999);
  tcfg.adam_eps = cfg.get_double_or("adam_eps", 1e-8);
  const std::string loss = cfg.get_string_or("loss", "auto");
  tcfg.loss = loss == "auto" ? (mcfg.kind == ModelKind::Classifier ? LossKind::CrossEntropy
                                                                   : LossKind::Mse)
                             : loss_kind_from_name(loss);
  tcfg.sparsity_lambda = cfg.get_double_or("sparsity_lambda", 0.0);
  tcfg.early_stop_enabled = cfg.get_bool_or("early_stop", false);
  tcfg.early_stop_min_delta = cfg.get_double_or("early_stop_min_delta", 0.01);
  tcfg.early_stop_patience = cfg.get_int_or("early_stop_patience", 10);
  tcfg.seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 0));
  tcfg.validation_fraction = cfg.get_double_or("validation_fraction", 0.1);

  Rng rng(tcfg.seed);
  Model model = Model::init(mcfg, rng);
  std::cerr << "training " << model_kind_name(mcfg.kind) << " ("
            << attention_kind_name(mcfg.attention) << " attention, " << model.param_count()
            << " parameters) on " << data.size() << " sequences\n";

  TrainResult result = train(std::move(model), data, tcfg);
  for (const EpochRecord& e : result.history.epochs) {
    std::fprintf(stderr, "epoch %3d  train %.6f  val %.6f  (%.2fs)\n", e.epoch, e.train_loss,
                 e.val_loss, e.seconds);
  }

  fs::create_directories(out_dir);
  save_model(result.model, (fs::path(out_dir) / "checkpoint.json").string());
  export_history_csv(result.history, (fs::path(out_dir) / "history.csv").string(),
                     cfg.get_bool_or("timing", false));
  write_resolved(cfg, out_dir);
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  const std::string out_dir = cfg.get_string("out");
  SequenceDataset data = load_csv_dataset(cfg.get_string("data"));
  Model model = load_model(cfg.get_string("checkpoint"));

  nlohmann::json report = nlohmann::json::object();
  std::vector<double> all_entropies;

  if (model.config.kind == ModelKind::Classifier) {
    ClassificationReport cls = classification_report(model, data);
    report["accuracy"] = cls.accuracy;
    nlohmann::json confusion = nlohmann::json::array();
    std::string confusion_csv;
    for (int i = 0; i < cls.confusion.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < cls.confusion.cols(); ++j) {
        row.push_back(static_cast<long long>(cls.confusion.at(i, j)));
        confusion_csv += (j ? "," : "") + std::to_string(
            static_cast<long long>(cls.confusion.at(i, j)));
      }
      confusion_csv += '\n';
      confusion.push_back(std::move(row));
    }
    report["confusion"] = std::move(confusion);
    fs::create_directories(out_dir);
    write_text_file((fs::path(out_dir) / "confusion.csv").string(), confusion_csv);

    // Attention localisation against labelled motif windows, over the
    // correctly classified sequences.
    int correct = 0, inside = 0;
    bool have_windows = true;
    for (std::size_t i = 0; i < data.size(); ++i) {
      ModelOut out = model_forward(model, data.inputs[i], nullptr, mask_for(model, data, i));
      for (double h : attention_entropy(out.A)) all_entropies.push_back(h);
      int pred = 0;
      for (int j = 1; j < out.Y.cols(); ++j) {
        if (out.Y.at(0, j) > out.Y.at(0, pred)) pred = j;
      }
      if (pred != data.labels[i]) continue;
      ++correct;
      const Truth& t = data.truths[i];
      if (!t.motif_start || !t.motif_len) {
        have_windows = false;
        continue;
      }
      AttentionReport rep = make_attention_report(out.A);
      const int loc = rep.argmax_locations.front();
      if (loc >= *t.motif_start && loc < *t.motif_start + *t.motif_len) ++inside;
    }
    if (have_windows && correct > 0) {
      report["attention_in_window_rate"] = static_cast<double>(inside) / correct;
    }
  } else {
    std::vector<Matrix> preds;
    double total_mse = 0.0;
    int detection_total = 0, detection_hits = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      ModelOut out = model_forward(model, data.inputs[i], nullptr, mask_for(model, data, i));
      for (double h : attention_entropy(out.A)) all_entropies.push_back(h);
      total_mse += mse_loss(out.Y, data.targets[i]).loss;
      if (data.truths[i].key_index) {
        AttentionReport rep = make_attention_report(out.A, *data.truths[i].key_index);
        ++detection_total;
        if (rep.detection_hit.value()) ++detection_hits;
      }
      preds.push_back(std::move(out.Y));
    }
    report["mse"] = total_mse / static_cast<double>(data.size());
    if (detection_total > 0) {
      report["detection_accuracy"] =
          static_cast<double>(detection_hits) / static_cast<double>(detection_total);
    }
    if (cfg.has("horizons")) {
      const std::vector<int> horizons = parse_horizons(cfg.get_string("horizons"));
      std::vector<Matrix> truths = data.targets;
      const std::vector<double> mses = mse_at_horizons(preds, truths, horizons);
      nlohmann::json jh = nlohmann::json::object();
      std::string horizons_csv = "horizon,mse\n";
      for (std::size_t k = 0; k < horizons.size(); ++k) {
        jh[std::to_string(horizons[k])] = mses[k];
        horizons_csv += std::to_string(horizons[k]) + "," + format_g17(mses[k]) + "\n";
      }
      report["mse_at_horizons"] = std::move(jh);
      fs::create_directories(out_dir);
      write_text_file((fs::path(out_dir) / "horizons.csv").string(), horizons_csv);
    }
  }

  report["median_entropy"] = median(all_entropies);
  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "report.json").string(), report.dump(2) + "\n");
  write_resolved(cfg, out_dir);
  std::cerr << "report written to " << (fs::path(out_dir) / "report.json").string() << "\n";
  return 0;
}

int cmd_attn(const RunConfig& cfg) {
  const std::string out_dir = cfg.get_string("out");
  SequenceDataset data = load_csv_dataset(cfg.get_string("data"));
  Model model = load_model(cfg.get_string("checkpoint"));

  const fs::path attn_dir = fs::path(out_dir) / "attn";
  fs::create_directories(attn_dir);

  std::vector<double> all_entropies;
  nlohmann::json sequences = nlohmann::json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    ModelOut out = model_forward(model, data.inputs[i], nullptr, mask_for(model, data, i));
    char stem[32];
    std::snprintf(stem, sizeof(stem), "seq_%zu", i);
    export_attention_csv(out.A, (attn_dir / (std::string(stem) + ".csv")).string());
    export_heatmap(out.A, (attn_dir / (std::string(stem) + ".pgm")).string());

    AttentionReport rep = make_attention_report(out.A);
    for (double h : rep.row_entropies) all_entropies.push_back(h);
    sequences.push_back({{"index", i},
                         {"entropies", rep.row_entropies},
                         {"argmax", rep.argmax_locations}});
  }

  nlohmann::json summary = {{"median_entropy", median(all_entropies)},
                            {"sequences", std::move(sequences)}};
  write_text_file((attn_dir / "summary.json").string(), summary.dump(2) + "\n");
  write_resolved(cfg, out_dir);
  std::cerr << "attention exports written to " << attn_dir.string() << "\n";
  return 0;
}

int cmd_gradcheck(const RunConfig& cfg) {
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 0));
  const std::vector<GradSuiteResult> results = run_gradient_suite(seed);
  bool all_ok = true;
  for (const GradSuiteResult& r : results) {
    const bool ok = r.max_rel_err < 1e-6;
    all_ok = all_ok && ok;
    std::printf("%-34s %.3e  %s\n", r.name.c_str(), r.max_rel_err, ok ? "ok" : "FAIL");
  }
  std::printf("gradcheck: %s\n", all_ok ? "PASS" : "FAIL");
  return all_ok ? 0 : 1;
}

}  // namespace tca::cli
