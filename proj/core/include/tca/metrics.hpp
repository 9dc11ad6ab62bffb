#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tca/dataset.hpp"
#include "tca/model.hpp"

namespace tca {

// Attention matrix of one sequence plus derived statistics.
struct AttentionReport {
  Matrix A;                           // m x n, row stochastic
  std::vector<double> row_entropies;  // nats, one per row
  std::vector<int> argmax_locations;  // ties broken to the lowest index
  std::optional<bool> detection_hit;  // argmax of row 0 vs truth, when known
};

AttentionReport make_attention_report(const Matrix& A,
                                      std::optional<int> truth_index = std::nullopt);

// Mean squared error over the test set at each requested output frame.
std::vector<double> mse_at_horizons(const std::vector<Matrix>& preds,
                                    const std::vector<Matrix>& truths,
                                    const std::vector<int>& horizon_indices);

struct ClassificationReport {
  double accuracy = 0.0;
  Matrix confusion;  // K x K counts, row = true label, column = predicted
};

ClassificationReport classification_report(const Model& model, const SequenceDataset& data);

// Shannon entropy of each attention row in nats, with 0*ln(0) = 0. Errors
// if any row sum deviates from 1 by more than 1e-6.
std::vector<double> attention_entropy(const Matrix& A);

// Fraction of sequences whose single attention row peaks at the true key
// frame. Reports must have m == 1.
double keyframe_detection_accuracy(const std::vector<AttentionReport>& reports,
                                   const std::vector<int>& truth_locations);

// ASCII PGM ("P2"), width n, height m, maxval 255, each pixel
// round(255 * a / global_max); all-zero input renders black.
void export_heatmap(const Matrix& A, const std::string& path);

// Raw values, 17 significant digits; re-parsing reproduces A bit for bit.
void export_attention_csv(const Matrix& A, const std::string& path);

double median(std::vector<double> values);

}  // namespace tca
