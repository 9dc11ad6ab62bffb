#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tca/matrix.hpp"
#include "tca/rng.hpp"

namespace tca {

// Per-sequence ground-truth annotations, filled by the generators and kept
// in the manifest so evaluation can score attention against them.
struct Truth {
  std::optional<int> hole_start;
  std::optional<int> hole_len;
  std::optional<int> key_index;    // frame holding the reconstruction target
  std::optional<int> motif_start;  // labelled motif window
  std::optional<int> motif_len;
  std::optional<int> true_len;  // valid frames before zero padding
};

// A set of (input sequence, target sequence or class label) pairs with
// per-sequence validity masks and a JSON manifest. Targets and labels are
// mutually exclusive: autoencoder datasets fill targets, classification
// datasets fill labels (and m stays 0).
struct SequenceDataset {
  std::string task;
  int n = 0;  // input length (rows per input matrix)
  int f = 0;  // feature width
  int m = 0;  // target length; 0 for classification datasets

  std::vector<Matrix> inputs;            // each n x f
  std::vector<Matrix> targets;           // each m x f
  std::vector<int> labels;               // class indices
  std::vector<std::vector<bool>> masks;  // each length n, true = valid frame
  std::vector<Truth> truths;
  nlohmann::json generator;  // generator arguments, for the manifest

  std::size_t size() const { return inputs.size(); }
  bool is_classification() const { return !labels.empty(); }
  int num_classes() const;  // max label + 1
};

// Smooth per-channel signal: a sum of sinusoids sharing one fundamental
// period per sequence (harmonic multiples with random amplitudes and
// phases), so frames one period apart repeat almost exactly. That shared
// period is what makes occluded frames recoverable from visible ones.
struct SignalSpec {
  struct Component {
    double amp;
    double omega;  // radians per frame
    double phase;
  };
  std::vector<std::vector<Component>> channels;  // [f][2..4]
  double period_frames = 0.0;

  double eval(int channel, double t) const;
  // Upper bound on |x(t+1) - x(t)| for one channel: sum of amp * omega.
  double step_bound(int channel) const;
};

// Draws a spec with 2-4 harmonics per channel, fundamental period chosen
// uniformly from period_choices, total amplitude per channel in
// [0.55, 0.9].
SignalSpec sample_signal_spec(Rng& rng, int f, const std::vector<double>& period_choices);

// Occlusion task: targets are full smooth sequences (clamped to [-1, 1]
// after additive Gaussian noise, sigma 0.01); inputs equal the targets with
// frames [hole_start, hole_start + hole_len) zeroed. m == n.
SequenceDataset gen_interpolation(std::uint64_t seed, int count, int n = 160, int hole_len = 60,
                                  int hole_start = 50, int f = 6);

// Forecasting task: inputs are the first `prefix` frames of a signal,
// targets the next `horizon` frames of the same signal.
SequenceDataset gen_extrapolation(std::uint64_t seed, int count, int prefix = 50, int horizon = 60,
                                  int f = 6);

// Key-frame task: every sequence shows each class exactly once (plus
// noise, sigma 0.05) in random order. The frame of target_class carries a
// per-sequence unit-norm instance (a perturbed prototype), and the target
// is that noiseless instance, so reconstruction requires reading the key
// frame; its location is the truth annotation. Prototypes are fixed
// unit-norm random vectors. When frames > classes the extra frames repeat
// non-target classes.
SequenceDataset gen_keyframe(std::uint64_t seed, int count, int frames = 10, int classes = 10,
                             int f = 32, int target_class = 2, double noise_sigma = 0.05);

// Classification task: low-amplitude noise with one class-specific smooth
// motif at a random position; true length is drawn uniformly and the tail
// is zero-padded with mask = false. Labels are assigned round robin, so
// classes stay balanced.
SequenceDataset gen_actions(std::uint64_t seed, int count, int classes = 9, int n = 64, int f = 16,
                            int motif_len = 12);

// Writes dir/manifest.json plus one CSV per sequence (two for autoencoder
// tasks). The manifest schema is
//   {"task":str, "n":int, "f":int, "m":int?, "sequences":[
//      {"input":path, "target":path | "label":int, "mask_len":int,
//       "truth":{...}}], "generator":{...}}
// with paths relative to the manifest.
void save_dataset(const SequenceDataset& ds, const std::string& dir);

// Loads a manifest written by save_dataset or assembled by hand. Sequences
// shorter than n are zero-padded and masked; longer ones are an error.
SequenceDataset load_csv_dataset(const std::string& manifest_path);

}  // namespace tca
