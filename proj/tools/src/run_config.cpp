#include "run_config.hpp"

#include <algorithm>
#include <cstdlib>

#include "tca/error.hpp"
#include "tca/textio.hpp"

namespace tca::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t lo = s.find_first_not_of(" \t\r\n");
  if (lo == std::string::npos) return "";
  std::size_t hi = s.find_last_not_of(" \t\r\n");
  return s.substr(lo, hi - lo + 1);
}

const std::vector<KeySpec> kGenKeys = {
    {"task", "string", "", "dataset to generate: interpolation|extrapolation|keyframe|actions"},
    {"out", "string", "", "output directory for the dataset"},
    {"seed", "int", "0", "generator seed"},
    {"count", "int", "100", "number of sequences"},
    {"n", "int", "", "sequence length (task default when unset)"},
    {"f", "int", "", "feature width (task default when unset)"},
    {"hole_start", "int", "50", "interpolation: first occluded frame"},
    {"hole_len", "int", "60", "interpolation: occluded frame count"},
    {"prefix", "int", "50", "extrapolation: input frames"},
    {"horizon", "int", "60", "extrapolation: predicted frames"},
    {"frames", "int", "10", "keyframe: frames per sequence"},
    {"classes", "int", "", "keyframe/actions: class count (10/9 default)"},
    {"target_class", "int", "2", "keyframe: class to reconstruct"},
    {"motif_len", "int", "12", "actions: motif window length"},
};

const std::vector<KeySpec> kTrainKeys = {
    {"data", "string", "", "dataset manifest path"},
    {"out", "string", "", "output directory (checkpoint.json, history.csv, resolved.cfg)"},
    {"seed", "int", "0", "initialisation and shuffling seed"},
    {"kind", "string", "auto", "model kind: auto|autoencoder|classifier"},
    {"attention", "string", "contextual", "attention layer: contextual|feedforward"},
    {"g", "int", "16", "latent width of the time-distributed encoder"},
    {"ffatt_hidden", "int", "0", "feedforward attention hidden width (0 = g)"},
    {"encoder_activation", "string", "tanh", "encoder activation: linear|tanh|relu"},
    {"decoder_activation", "string", "linear", "autoencoder head activation"},
    {"mask", "bool", "false", "exclude padded frames from attention"},
    {"batch_size", "int", "8", "sequences per optimizer step"},
    {"max_epochs", "int", "50", "epoch cap"},
    {"learning_rate", "double", "0.001", "optimizer step size"},
    {"optimizer", "string", "adam", "sgd|adam"},
    {"adam_beta1", "double", "0.9", "adam first-moment decay"},
    {"adam_beta2", "double", "0.999", "adam second-moment decay"},
    {"adam_eps", "double", "1e-8", "adam denominator floor"},
    {"loss", "string", "auto", "auto|mse|cross_entropy"},
    {"sparsity_lambda", "double", "0", "weight of the attention sparsity penalty"},
    {"early_stop", "bool", "false", "stop when validation stalls"},
    {"early_stop_min_delta", "double", "0.01", "improvement below this counts as a stall"},
    {"early_stop_patience", "int", "10", "stalled epochs before stopping"},
    {"validation_fraction", "double", "0.1", "held-out fraction for validation"},
    {"timing", "bool", "false", "write wall seconds into history.csv (non-reproducible)"},
};

const std::vector<KeySpec> kEvalKeys = {
    {"data", "string", "", "dataset manifest path"},
    {"checkpoint", "string", "", "model checkpoint to evaluate"},
    {"out", "string", "", "output directory (report.json, resolved.cfg)"},
    {"horizons", "string", "", "comma-separated output frame indices for per-horizon MSE"},
};

const std::vector<KeySpec> kAttnKeys = {
    {"data", "string", "", "dataset manifest path"},
    {"checkpoint", "string", "", "model checkpoint"},
    {"out", "string", "", "output directory (attn/seq_<i>.csv|.pgm, attn/summary.json)"},
};

const std::vector<KeySpec> kGradcheckKeys = {
    {"seed", "int", "0", "suite seed"},
};

}  // namespace

RunConfig::RunConfig(std::string command, std::vector<KeySpec> keys)
    : command_(std::move(command)), keys_(std::move(keys)) {
  for (const KeySpec& k : keys_) {
    if (!k.fallback.empty()) values_[k.name] = k.fallback;
  }
}

const KeySpec& RunConfig::spec_for(const std::string& key) const {
  for (const KeySpec& k : keys_) {
    if (k.name == key) return k;
  }
  throw ConfigError("unknown key '" + key + "' for '" + command_ + "' (see tca " + command_ +
                    " --help)");
}

void RunConfig::validate_value(const KeySpec& spec, const std::string& value) const {
  const char* s = value.c_str();
  char* end = nullptr;
  if (spec.type == "int") {
    std::strtol(s, &end, 10);
    if (end == s || *end != '\0') {
      throw ConfigError("key '" + spec.name + "' expects an integer, got '" + value + "'");
    }
  } else if (spec.type == "double") {
    std::strtod(s, &end);
    if (end == s || *end != '\0') {
      throw ConfigError("key '" + spec.name + "' expects a number, got '" + value + "'");
    }
  } else if (spec.type == "bool") {
    if (value != "true" && value != "false" && value != "1" && value != "0") {
      throw ConfigError("key '" + spec.name + "' expects true|false, got '" + value + "'");
    }
  }
}

void RunConfig::load_file(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError&) {
    throw ConfigError("cannot read config file: " + path);
  }
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string line =
        trim(text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const KeySpec& spec = spec_for(key);
    validate_value(spec, value);
    values_[key] = value;
  }
}

void RunConfig::set_override(const std::string& key, const std::string& value) {
  const KeySpec& spec = spec_for(key);
  validate_value(spec, value);
  values_[key] = value;
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string RunConfig::get_string(const std::string& key) const {
  spec_for(key);
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("'" + command_ + "' requires key '" + key + "'");
  }
  return it->second;
}

std::string RunConfig::get_string_or(const std::string& key, const std::string& fallback) const {
  spec_for(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int RunConfig::get_int(const std::string& key) const {
  return static_cast<int>(std::strtol(get_string(key).c_str(), nullptr, 10));
}

int RunConfig::get_int_or(const std::string& key, int fallback) const {
  if (!has(key)) {
    spec_for(key);
    return fallback;
  }
  return get_int(key);
}

double RunConfig::get_double(const std::string& key) const {
  return std::strtod(get_string(key).c_str(), nullptr);
}

double RunConfig::get_double_or(const std::string& key, double fallback) const {
  if (!has(key)) {
    spec_for(key);
    return fallback;
  }
  return get_double(key);
}

bool RunConfig::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) {
    spec_for(key);
    return fallback;
  }
  const std::string v = get_string(key);
  return v == "true" || v == "1";
}

std::string RunConfig::resolved_text() const {
  std::string out;
  for (const auto& [key, value] : values_) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

std::string RunConfig::help_text() const {
  std::string out = "usage: tca " + command_ + " [--config FILE] [--key value ...]\n\n";
  out += "Keys (config file `key = value` lines or --key value overrides):\n";
  std::size_t width = 0;
  for (const KeySpec& k : keys_) width = std::max(width, k.name.size());
  for (const KeySpec& k : keys_) {
    out += "  --" + k.name + std::string(width - k.name.size() + 2, ' ');
    out += k.type;
    out += k.fallback.empty() ? "  (required or task default)  " : "  [" + k.fallback + "]  ";
    out += k.help;
    out += '\n';
  }
  return out;
}

RunConfig make_run_config(const std::string& command) {
  if (command == "gen") return RunConfig("gen", kGenKeys);
  if (command == "train") return RunConfig("train", kTrainKeys);
  if (command == "eval") return RunConfig("eval", kEvalKeys);
  if (command == "attn") return RunConfig("attn", kAttnKeys);
  if (command == "gradcheck") return RunConfig("gradcheck", kGradcheckKeys);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace tca::cli
