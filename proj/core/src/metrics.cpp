#include "tca/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tca/error.hpp"
#include "tca/textio.hpp"

namespace tca {

AttentionReport make_attention_report(const Matrix& A, std::optional<int> truth_index) {
  AttentionReport rep;
  rep.A = A;
  rep.row_entropies = attention_entropy(A);
  rep.argmax_locations.reserve(A.rows());
  for (int i = 0; i < A.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < A.cols(); ++j) {
      if (A.at(i, j) > A.at(i, best)) best = j;  // strict >: ties keep lowest index
    }
    rep.argmax_locations.push_back(best);
  }
  if (truth_index) rep.detection_hit = rep.argmax_locations.front() == *truth_index;
  return rep;
}

std::vector<double> mse_at_horizons(const std::vector<Matrix>& preds,
                                    const std::vector<Matrix>& truths,
                                    const std::vector<int>& horizon_indices) {
  if (preds.size() != truths.size() || preds.empty()) {
    throw Error("mse_at_horizons: need equally many non-empty preds and truths");
  }
  for (int h : horizon_indices) {
    if (h < 0 || h >= preds.front().rows()) {
      throw Error("mse_at_horizons: horizon index " + std::to_string(h) + " out of range [0, " +
                  std::to_string(preds.front().rows()) + ")");
    }
  }
  std::vector<double> out;
  out.reserve(horizon_indices.size());
  for (int h : horizon_indices) {
    double sum = 0.0;
    std::size_t terms = 0;
    for (std::size_t s = 0; s < preds.size(); ++s) {
      if (!preds[s].same_shape(truths[s])) {
        throw ShapeError("mse_at_horizons: pred " + preds[s].shape_str() + " vs truth " +
                         truths[s].shape_str());
      }
      for (int ch = 0; ch < preds[s].cols(); ++ch) {
        const double d = preds[s].at(h, ch) - truths[s].at(h, ch);
        sum += d * d;
        ++terms;
      }
    }
    out.push_back(sum / static_cast<double>(terms));
  }
  return out;
}

ClassificationReport classification_report(const Model& model, const SequenceDataset& data) {
  if (model.config.kind != ModelKind::Classifier) {
    throw Error("classification_report: model is not a classifier");
  }
  if (!data.is_classification()) {
    throw Error("classification_report: dataset has no labels");
  }
  const int k = model.config.num_classes;
  ClassificationReport rep;
  rep.confusion = Matrix(k, k);
  int correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int label = data.labels[i];
    if (label < 0 || label >= k) {
      throw Error("classification_report: label " + std::to_string(label) + " out of range [0, " +
                  std::to_string(k) + ")");
    }
    const std::vector<bool>* mask = model.config.mask_enabled ? &data.masks[i] : nullptr;
    ModelOut out = model_forward(model, data.inputs[i], nullptr, mask);
    int pred = 0;
    for (int j = 1; j < k; ++j) {
      if (out.Y.at(0, j) > out.Y.at(0, pred)) pred = j;
    }
    rep.confusion.at(label, pred) += 1.0;
    if (pred == label) ++correct;
  }
  rep.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return rep;
}

std::vector<double> attention_entropy(const Matrix& A) {
  std::vector<double> out;
  out.reserve(A.rows());
  for (int i = 0; i < A.rows(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < A.cols(); ++j) sum += A.at(i, j);
    if (std::fabs(sum - 1.0) > 1e-6) {
      throw Error("attention_entropy: row " + std::to_string(i) + " sums to " + format_g17(sum) +
                  ", not 1");
    }
    double h = 0.0;
    for (int j = 0; j < A.cols(); ++j) {
      const double a = A.at(i, j);
      if (a > 0.0) h -= a * std::log(a);
    }
    out.push_back(h);
  }
  return out;
}

double keyframe_detection_accuracy(const std::vector<AttentionReport>& reports,
                                   const std::vector<int>& truth_locations) {
  if (reports.size() != truth_locations.size() || reports.empty()) {
    throw Error("keyframe_detection_accuracy: need equally many non-empty reports and truths");
  }
  int hits = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].A.rows() != 1) {
      throw Error("keyframe_detection_accuracy: report " + std::to_string(i) +
                  " has m != 1 attention");
    }
    if (reports[i].argmax_locations.front() == truth_locations[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(reports.size());
}

void export_heatmap(const Matrix& A, const std::string& path) {
  const double gmax = [&] {
    double m = 0.0;
    for (double v : A.data()) m = std::max(m, v);
    return m;
  }();
  std::string out = "P2\n";
  out += std::to_string(A.cols()) + " " + std::to_string(A.rows()) + "\n255\n";
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < A.cols(); ++j) {
      const int px =
          gmax > 0.0 ? static_cast<int>(std::lround(255.0 * A.at(i, j) / gmax)) : 0;
      if (j) out += ' ';
      out += std::to_string(std::clamp(px, 0, 255));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

void export_attention_csv(const Matrix& A, const std::string& path) { write_matrix_csv(A, path); }

double median(std::vector<double> values) {
  if (values.empty()) throw Error("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace tca
