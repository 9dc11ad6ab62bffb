#include "tca/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "tca/error.hpp"
#include "tca/textio.hpp"

namespace fs = std::filesystem;

namespace tca {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

int SequenceDataset::num_classes() const {
  int k = 0;
  for (int label : labels) k = std::max(k, label + 1);
  return k;
}

double SignalSpec::eval(int channel, double t) const {
  double x = 0.0;
  for (const Component& c : channels[channel]) x += c.amp * std::sin(c.omega * t + c.phase);
  return x;
}

double SignalSpec::step_bound(int channel) const {
  double b = 0.0;
  for (const Component& c : channels[channel]) b += c.amp * c.omega;
  return b;
}

SignalSpec sample_signal_spec(Rng& rng, int f, const std::vector<double>& period_choices) {
  SignalSpec spec;
  spec.period_frames = period_choices[rng.below(static_cast<int>(period_choices.size()))];
  const double omega0 = kTwoPi / spec.period_frames;
  spec.channels.resize(f);
  for (int ch = 0; ch < f; ++ch) {
    const int k = 2 + rng.below(3);  // 2..4 sinusoids
    std::vector<SignalSpec::Component> comps(k);
    double amp_sum = 0.0;
    for (auto& c : comps) {
      c.amp = rng.uniform(0.3, 1.0);
      amp_sum += c.amp;
      c.omega = omega0 * (1 + rng.below(3));  // harmonics 1..3 of the fundamental
      c.phase = rng.uniform(0.0, kTwoPi);
    }
    const double total = rng.uniform(0.55, 0.9);
    for (auto& c : comps) c.amp *= total / amp_sum;
    spec.channels[ch] = std::move(comps);
  }
  return spec;
}

namespace {

Matrix render_signal(const SignalSpec& spec, Rng& rng, int t0, int len, int f, double noise_sigma,
                     bool clamp_unit) {
  Matrix out(len, f);
  for (int t = 0; t < len; ++t) {
    for (int ch = 0; ch < f; ++ch) {
      double v = spec.eval(ch, t0 + t);
      if (noise_sigma > 0.0) v += rng.normal(0.0, noise_sigma);
      if (clamp_unit) v = std::clamp(v, -1.0, 1.0);
      out.at(t, ch) = v;
    }
  }
  return out;
}

std::vector<bool> all_true_mask(int n) { return std::vector<bool>(n, true); }

}  // namespace

SequenceDataset gen_interpolation(std::uint64_t seed, int count, int n, int hole_len,
                                  int hole_start, int f) {
  if (hole_start < 0 || hole_len < 1 || hole_start + hole_len > n) {
    throw DataError("gen_interpolation: hole [" + std::to_string(hole_start) + ", " +
                    std::to_string(hole_start + hole_len) + ") does not fit in n=" +
                    std::to_string(n));
  }
  // Fundamental periods between roughly n/2.7 and n/2 frames: long enough
  // that every occluded frame has an in-phase visible twin in the prefix or
  // suffix, short enough that the visible context covers a full cycle.
  const std::vector<double> periods = {n / 2.0, n / 2.2, n / 2.4, n / 2.6};

  SequenceDataset ds;
  ds.task = "interpolation";
  ds.n = n;
  ds.f = f;
  ds.m = n;
  ds.generator = {{"task", "interpolation"}, {"seed", seed},           {"count", count},
                  {"n", n},                  {"hole_len", hole_len},   {"hole_start", hole_start},
                  {"f", f},                  {"noise_sigma", 0.01}};

  Rng rng(seed);
  for (int s = 0; s < count; ++s) {
    SignalSpec spec = sample_signal_spec(rng, f, periods);
    Matrix target = render_signal(spec, rng, 0, n, f, 0.01, true);
    Matrix input = target;
    for (int t = hole_start; t < hole_start + hole_len; ++t) {
      for (int ch = 0; ch < f; ++ch) input.at(t, ch) = 0.0;
    }
    Truth truth;
    truth.hole_start = hole_start;
    truth.hole_len = hole_len;
    ds.inputs.push_back(std::move(input));
    ds.targets.push_back(std::move(target));
    ds.masks.push_back(all_true_mask(n));
    ds.truths.push_back(truth);
  }
  return ds;
}

SequenceDataset gen_extrapolation(std::uint64_t seed, int count, int prefix, int horizon, int f) {
  if (prefix < 1 || horizon < 1) {
    throw DataError("gen_extrapolation: prefix and horizon must be >= 1");
  }
  // Periods no longer than the prefix, so the visible history always
  // contains at least one full cycle of the signal being continued.
  const double cap = static_cast<double>(prefix);
  const std::vector<double> periods = {cap * 0.64, cap * 0.72, cap * 0.8};

  SequenceDataset ds;
  ds.task = "extrapolation";
  ds.n = prefix;
  ds.f = f;
  ds.m = horizon;
  ds.generator = {{"task", "extrapolation"}, {"seed", seed}, {"count", count},
                  {"prefix", prefix},        {"horizon", horizon}, {"f", f},
                  {"noise_sigma", 0.01}};

  Rng rng(seed);
  for (int s = 0; s < count; ++s) {
    SignalSpec spec = sample_signal_spec(rng, f, periods);
    Matrix input = render_signal(spec, rng, 0, prefix, f, 0.01, true);
    Matrix target = render_signal(spec, rng, prefix, horizon, f, 0.01, true);
    ds.inputs.push_back(std::move(input));
    ds.targets.push_back(std::move(target));
    ds.masks.push_back(all_true_mask(prefix));
    ds.truths.push_back(Truth{});
  }
  return ds;
}

SequenceDataset gen_keyframe(std::uint64_t seed, int count, int frames, int classes, int f,
                             int target_class, double noise_sigma) {
  if (f < classes) {
    throw DataError("gen_keyframe: need f >= classes for separable prototypes, got f=" +
                    std::to_string(f) + " classes=" + std::to_string(classes));
  }
  if (frames < classes) {
    throw DataError("gen_keyframe: need frames >= classes so every class appears once, got frames=" +
                    std::to_string(frames) + " classes=" + std::to_string(classes));
  }
  if (target_class < 0 || target_class >= classes) {
    throw DataError("gen_keyframe: target_class out of range");
  }

  SequenceDataset ds;
  ds.task = "keyframe";
  ds.n = frames;
  ds.f = f;
  ds.m = 1;
  ds.generator = {{"task", "keyframe"}, {"seed", seed}, {"count", count},
                  {"frames", frames},   {"classes", classes}, {"f", f},
                  {"target_class", target_class}, {"noise_sigma", noise_sigma},
                  {"instance_scale", 1.0}};

  Rng rng(seed);
  // Fixed prototypes shared by every sequence: random near-orthogonal
  // directions scaled per class. The reconstructed class appears at full
  // amplitude while the other classes stay faint, the way the subject of
  // a shot stands out from background clutter; that prominence is what a
  // reconstruction-trained attention layer can latch onto from scratch.
  Matrix prototypes(classes, f);
  std::vector<double> class_norms(classes);
  for (int c = 0; c < classes; ++c) {
    class_norms[c] = classes > 1 ? 0.5 + 0.5 * c / (classes - 1) : 0.8;
  }
  class_norms[target_class] = 2.4;
  for (int c = 0; c < classes; ++c) {
    double norm_sq = 0.0;
    for (int j = 0; j < f; ++j) {
      const double v = rng.normal(0.0, 1.0);
      prototypes.at(c, j) = v;
      norm_sq += v * v;
    }
    const double inv = class_norms[c] / std::sqrt(norm_sq);
    for (int j = 0; j < f; ++j) prototypes.at(c, j) *= inv;
  }

  const double instance_scale = 1.0;
  for (int s = 0; s < count; ++s) {
    // Class sequence: each class once, extras repeat non-target classes.
    std::vector<int> order(frames);
    for (int i = 0; i < classes; ++i) order[i] = i;
    for (int i = classes; i < frames; ++i) {
      int c = rng.below(classes - 1);
      if (c >= target_class) ++c;
      order[i] = c;
    }
    for (int i = frames - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

    // Every frame is a fresh per-sequence instance of its class: a wide
    // perturbation of the class prototype rescaled to the class radius.
    // The target is the noiseless instance shown at the key frame, so
    // reconstruction requires reading that frame; instances vary enough
    // that memorising one output is far worse than decoding the frame.
    auto draw_instance = [&](int cls) {
      Matrix v(1, f);
      double norm_sq = 0.0;
      for (int j = 0; j < f; ++j) {
        const double u = rng.normal(0.0, 1.0);
        v.at(0, j) = u;
        norm_sq += u * u;
      }
      const double radius = class_norms[cls];
      const double inv = instance_scale * radius / std::sqrt(norm_sq);
      norm_sq = 0.0;
      for (int j = 0; j < f; ++j) {
        v.at(0, j) = prototypes.at(cls, j) + v.at(0, j) * inv;
        norm_sq += v.at(0, j) * v.at(0, j);
      }
      const double unit = radius / std::sqrt(norm_sq);
      for (int j = 0; j < f; ++j) v.at(0, j) *= unit;
      return v;
    };

    Matrix input(frames, f);
    Matrix target(1, f);
    int key_index = -1;
    for (int i = 0; i < frames; ++i) {
      Matrix instance = draw_instance(order[i]);
      if (order[i] == target_class) {
        key_index = i;
        target = instance;
      }
      for (int j = 0; j < f; ++j) {
        input.at(i, j) = instance.at(0, j) + rng.normal(0.0, noise_sigma);
      }
    }

    Truth truth;
    truth.key_index = key_index;
    ds.inputs.push_back(std::move(input));
    ds.targets.push_back(std::move(target));
    ds.masks.push_back(all_true_mask(frames));
    ds.truths.push_back(truth);
  }
  return ds;
}

SequenceDataset gen_actions(std::uint64_t seed, int count, int classes, int n, int f,
                            int motif_len) {
  if (motif_len < 1 || motif_len >= n) {
    throw DataError("gen_actions: motif_len must be in [1, n), got " + std::to_string(motif_len) +
                    " with n=" + std::to_string(n));
  }
  if (classes < 2) throw DataError("gen_actions: need at least 2 classes");

  SequenceDataset ds;
  ds.task = "actions";
  ds.n = n;
  ds.f = f;
  ds.m = 0;
  ds.generator = {{"task", "actions"}, {"seed", seed}, {"count", count}, {"classes", classes},
                  {"n", n},            {"f", f},       {"motif_len", motif_len},
                  {"noise_sigma", 0.05}};

  Rng rng(seed);
  // One fixed smooth motif per class: a sinusoid per channel under a smooth
  // on/off envelope, amplitude well above the background noise.
  struct MotifChannel {
    double amp, omega, phase;
  };
  std::vector<std::vector<MotifChannel>> motifs(classes, std::vector<MotifChannel>(f));
  for (int c = 0; c < classes; ++c) {
    for (int ch = 0; ch < f; ++ch) {
      motifs[c][ch].amp = rng.uniform(0.6, 1.0) * (rng.below(2) == 0 ? 1.0 : -1.0);
      motifs[c][ch].omega = rng.uniform(1.0, 3.0) * 3.14159265358979323846 / motif_len;
      motifs[c][ch].phase = rng.uniform(0.0, kTwoPi);
    }
  }

  const int min_len = std::max(motif_len, (n * 3 + 4) / 5);  // ~60% of n
  for (int s = 0; s < count; ++s) {
    const int label = s % classes;
    const int true_len = min_len + rng.below(n - min_len + 1);
    const int start = rng.below(true_len - motif_len + 1);

    Matrix input(n, f);
    std::vector<bool> mask(n, false);
    for (int t = 0; t < true_len; ++t) {
      mask[t] = true;
      for (int ch = 0; ch < f; ++ch) input.at(t, ch) = rng.normal(0.0, 0.05);
    }
    for (int t = 0; t < motif_len; ++t) {
      const double envelope = std::sin(3.14159265358979323846 * (t + 0.5) / motif_len);
      for (int ch = 0; ch < f; ++ch) {
        const MotifChannel& mc = motifs[label][ch];
        input.at(start + t, ch) += envelope * mc.amp * std::sin(mc.omega * t + mc.phase);
      }
    }

    Truth truth;
    truth.motif_start = start;
    truth.motif_len = motif_len;
    truth.true_len = true_len;
    ds.inputs.push_back(std::move(input));
    ds.labels.push_back(label);
    ds.masks.push_back(std::move(mask));
    ds.truths.push_back(truth);
  }
  return ds;
}

namespace {

nlohmann::json truth_to_json(const Truth& t) {
  nlohmann::json j = nlohmann::json::object();
  if (t.hole_start) j["hole_start"] = *t.hole_start;
  if (t.hole_len) j["hole_len"] = *t.hole_len;
  if (t.key_index) j["key_index"] = *t.key_index;
  if (t.motif_start) j["motif_start"] = *t.motif_start;
  if (t.motif_len) j["motif_len"] = *t.motif_len;
  if (t.true_len) j["true_len"] = *t.true_len;
  return j;
}

Truth truth_from_json(const nlohmann::json& j) {
  Truth t;
  if (j.contains("hole_start")) t.hole_start = j["hole_start"].get<int>();
  if (j.contains("hole_len")) t.hole_len = j["hole_len"].get<int>();
  if (j.contains("key_index")) t.key_index = j["key_index"].get<int>();
  if (j.contains("motif_start")) t.motif_start = j["motif_start"].get<int>();
  if (j.contains("motif_len")) t.motif_len = j["motif_len"].get<int>();
  if (j.contains("true_len")) t.true_len = j["true_len"].get<int>();
  return t;
}

int mask_valid_prefix(const std::vector<bool>& mask) {
  int len = 0;
  while (len < static_cast<int>(mask.size()) && mask[len]) ++len;
  for (int i = len; i < static_cast<int>(mask.size()); ++i) {
    if (mask[i]) throw DataError("save_dataset: mask is not a valid-prefix mask");
  }
  return len;
}

std::string seq_file_name(std::size_t index, const char* role) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "seq_%04zu_%s.csv", index, role);
  return buf;
}

}  // namespace

void save_dataset(const SequenceDataset& ds, const std::string& dir) {
  if (ds.inputs.empty()) throw DataError("save_dataset: empty dataset");
  if (ds.masks.size() != ds.inputs.size() || ds.truths.size() != ds.inputs.size()) {
    throw DataError("save_dataset: parallel lists differ in length");
  }
  const bool classification = ds.is_classification();
  if (classification && ds.labels.size() != ds.inputs.size()) {
    throw DataError("save_dataset: labels missing for some sequences");
  }
  if (!classification && ds.targets.size() != ds.inputs.size()) {
    throw DataError("save_dataset: targets missing for some sequences");
  }

  fs::create_directories(dir);
  nlohmann::json sequences = nlohmann::json::array();
  for (std::size_t i = 0; i < ds.inputs.size(); ++i) {
    // The CSV stores only the valid frames; padding is reapplied on load.
    const int valid = mask_valid_prefix(ds.masks[i]);
    Matrix trimmed(valid, ds.f);
    for (int t = 0; t < valid; ++t)
      for (int ch = 0; ch < ds.f; ++ch) trimmed.at(t, ch) = ds.inputs[i].at(t, ch);

    const std::string input_name = seq_file_name(i, "input");
    write_matrix_csv(trimmed, (fs::path(dir) / input_name).string());

    nlohmann::json entry = {{"input", input_name}, {"mask_len", valid}};
    if (classification) {
      entry["label"] = ds.labels[i];
    } else {
      const std::string target_name = seq_file_name(i, "target");
      write_matrix_csv(ds.targets[i], (fs::path(dir) / target_name).string());
      entry["target"] = target_name;
    }
    entry["truth"] = truth_to_json(ds.truths[i]);
    sequences.push_back(std::move(entry));
  }

  nlohmann::json manifest = {{"task", ds.task}, {"n", ds.n}, {"f", ds.f},
                             {"sequences", std::move(sequences)}, {"generator", ds.generator}};
  if (!classification) manifest["m"] = ds.m;
  write_text_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

SequenceDataset load_csv_dataset(const std::string& manifest_path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(manifest_path));
  } catch (const IoError&) {
    throw DataError("missing or unreadable manifest: " + manifest_path);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest " + manifest_path + ": malformed JSON: " + e.what());
  }

  SequenceDataset ds;
  try {
    ds.task = doc.at("task").get<std::string>();
    ds.n = doc.at("n").get<int>();
    ds.f = doc.at("f").get<int>();
    ds.m = doc.contains("m") ? doc["m"].get<int>() : 0;
    if (doc.contains("generator")) ds.generator = doc["generator"];
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest " + manifest_path + ": bad header: " + e.what());
  }
  if (ds.n < 1 || ds.f < 1) {
    throw DataError("manifest " + manifest_path + ": n and f must be >= 1");
  }
  if (!doc.contains("sequences") || !doc["sequences"].is_array() || doc["sequences"].empty()) {
    throw DataError("manifest " + manifest_path + ": no sequences");
  }

  const fs::path base = fs::path(manifest_path).parent_path();
  for (const auto& entry : doc["sequences"]) {
    if (!entry.contains("input")) {
      throw DataError("manifest " + manifest_path + ": sequence entry without input");
    }
    const std::string input_path = (base / entry["input"].get<std::string>()).string();
    Matrix raw = read_matrix_csv(input_path);
    if (raw.cols() != ds.f) {
      throw DataError(input_path + ": expected " + std::to_string(ds.f) + " columns, got " +
                      std::to_string(raw.cols()));
    }
    if (raw.rows() > ds.n) {
      throw DataError(input_path + ": " + std::to_string(raw.rows()) +
                      " rows exceed sequence length n=" + std::to_string(ds.n));
    }
    const int declared = entry.contains("mask_len") ? entry["mask_len"].get<int>() : raw.rows();
    if (declared != raw.rows()) {
      throw DataError(input_path + ": mask_len " + std::to_string(declared) +
                      " does not match " + std::to_string(raw.rows()) + " rows");
    }

    Matrix input(ds.n, ds.f);  // zero rows beyond the valid prefix
    std::vector<bool> mask(ds.n, false);
    for (int t = 0; t < raw.rows(); ++t) {
      mask[t] = true;
      for (int ch = 0; ch < ds.f; ++ch) input.at(t, ch) = raw.at(t, ch);
    }
    if (!input.all_finite()) throw DataError(input_path + ": non-finite values");

    if (entry.contains("label")) {
      ds.labels.push_back(entry["label"].get<int>());
    } else if (entry.contains("target")) {
      const std::string target_path = (base / entry["target"].get<std::string>()).string();
      Matrix target = read_matrix_csv(target_path);
      if (ds.m == 0) ds.m = target.rows();
      if (target.rows() != ds.m || target.cols() != ds.f) {
        throw DataError(target_path + ": expected " + std::to_string(ds.m) + "x" +
                        std::to_string(ds.f) + ", got " + target.shape_str());
      }
      if (!target.all_finite()) throw DataError(target_path + ": non-finite values");
      ds.targets.push_back(std::move(target));
    } else {
      throw DataError("manifest " + manifest_path + ": sequence entry needs target or label");
    }

    ds.inputs.push_back(std::move(input));
    ds.masks.push_back(std::move(mask));
    ds.truths.push_back(entry.contains("truth") ? truth_from_json(entry["truth"]) : Truth{});
  }

  if (!ds.labels.empty() && !ds.targets.empty()) {
    throw DataError("manifest " + manifest_path + ": mixes labels and targets");
  }
  return ds;
}

}  // namespace tca
