#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "tca/dataset.hpp"
#include "tca/error.hpp"
#include "tca/metrics.hpp"
#include "tca/textio.hpp"

using tca::Matrix;
using tca::Rng;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "tca_metrics_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(EntropyTest, KnownValues) {
  Matrix uniform10 = Matrix::constant(1, 10, 0.1);
  EXPECT_NEAR(tca::attention_entropy(uniform10)[0], std::log(10.0), 1e-12);

  Matrix one_hot = {{0.0, 0.0, 1.0, 0.0}};
  EXPECT_EQ(tca::attention_entropy(one_hot)[0], 0.0);

  Matrix two = {{0.5, 0.5, 0.0, 0.0}};
  EXPECT_NEAR(tca::attention_entropy(two)[0], std::log(2.0), 1e-12);
}

TEST(EntropyTest, BoundsProperty) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + rng.below(12);
    Matrix a = tca::row_softmax(tca::rng_fill(rng, 3, n, tca::Dist::uniform(-4, 4)));
    for (double h : tca::attention_entropy(a)) {
      EXPECT_GE(h, 0.0);
      EXPECT_LE(h, std::log(static_cast<double>(n)) + 1e-12);
    }
  }
}

TEST(EntropyTest, NonStochasticRowRejected) {
  Matrix bad = {{0.5, 0.6}};
  EXPECT_THROW(tca::attention_entropy(bad), tca::Error);
}

TEST(MseAtHorizonsTest, ZeroForPerfectPredictions) {
  Rng rng(2);
  std::vector<Matrix> preds, truths;
  for (int s = 0; s < 4; ++s) {
    Matrix m = tca::rng_fill(rng, 10, 3, tca::Dist::uniform(-1, 1));
    preds.push_back(m);
    truths.push_back(m);
  }
  for (double v : tca::mse_at_horizons(preds, truths, {0, 5, 9})) EXPECT_EQ(v, 0.0);
}

TEST(MseAtHorizonsTest, ConstantOffsetAnalytic) {
  Rng rng(3);
  std::vector<Matrix> preds, truths;
  for (int s = 0; s < 4; ++s) {
    Matrix t = tca::rng_fill(rng, 10, 3, tca::Dist::uniform(-1, 1));
    Matrix p = t;
    for (double& v : p.data()) v += 0.1;
    preds.push_back(p);
    truths.push_back(t);
  }
  for (double v : tca::mse_at_horizons(preds, truths, {1, 4, 8})) EXPECT_NEAR(v, 0.01, 1e-12);
}

TEST(MseAtHorizonsTest, IndexOutOfRangeRejected) {
  std::vector<Matrix> preds = {Matrix(5, 2)};
  std::vector<Matrix> truths = {Matrix(5, 2)};
  EXPECT_THROW(tca::mse_at_horizons(preds, truths, {5}), tca::Error);
}

TEST(AttentionReportTest, ArgmaxTiesBreakLow) {
  Matrix a = {{0.25, 0.25, 0.25, 0.25}};
  tca::AttentionReport rep = tca::make_attention_report(a, 0);
  EXPECT_EQ(rep.argmax_locations[0], 0);
  EXPECT_TRUE(rep.detection_hit.value());
  EXPECT_NEAR(rep.row_entropies[0], std::log(4.0), 1e-12);
}

TEST(DetectionAccuracyTest, AllCorrect) {
  std::vector<tca::AttentionReport> reports;
  std::vector<int> truths;
  for (int i = 0; i < 5; ++i) {
    Matrix a(1, 6);
    a.at(0, i) = 1.0;
    reports.push_back(tca::make_attention_report(a));
    truths.push_back(i);
  }
  EXPECT_EQ(tca::keyframe_detection_accuracy(reports, truths), 1.0);
}

TEST(DetectionAccuracyTest, RandomAttentionNearChance) {
  // Uniformly random scores over 10 frames: argmax matches a random truth
  // about 10% of the time.
  Rng rng(4);
  std::vector<tca::AttentionReport> reports;
  std::vector<int> truths;
  for (int i = 0; i < 10000; ++i) {
    Matrix a = tca::row_softmax(tca::rng_fill(rng, 1, 10, tca::Dist::uniform(-1, 1)));
    reports.push_back(tca::make_attention_report(a));
    truths.push_back(rng.below(10));
  }
  EXPECT_NEAR(tca::keyframe_detection_accuracy(reports, truths), 0.1, 0.02);
}

TEST(DetectionAccuracyTest, LengthMismatchRejected) {
  std::vector<tca::AttentionReport> reports = {tca::make_attention_report(Matrix{{1.0}})};
  EXPECT_THROW(tca::keyframe_detection_accuracy(reports, {0, 1}), tca::Error);
}

TEST(HeatmapTest, UniformRendersFullWhite) {
  Matrix a = Matrix::constant(2, 4, 0.25);
  const auto path = (temp_dir() / "uniform.pgm").string();
  tca::export_heatmap(a, path);
  EXPECT_EQ(tca::read_text_file(path),
            "P2\n4 2\n255\n255 255 255 255\n255 255 255 255\n");
}

TEST(HeatmapTest, OneHotRendersSinglePixelPerRow) {
  Matrix a(2, 3);
  a.at(0, 1) = 1.0;
  a.at(1, 2) = 1.0;
  const auto path = (temp_dir() / "onehot.pgm").string();
  tca::export_heatmap(a, path);
  EXPECT_EQ(tca::read_text_file(path), "P2\n3 2\n255\n0 255 0\n0 0 255\n");
}

TEST(HeatmapTest, InvariantUnderPositiveRescaling) {
  Rng rng(5);
  Matrix raw = tca::rng_fill(rng, 3, 5, tca::Dist::uniform(0, 2));
  const auto p1 = (temp_dir() / "scale1.pgm").string();
  const auto p2 = (temp_dir() / "scale2.pgm").string();
  tca::export_heatmap(raw, p1);
  tca::export_heatmap(tca::scale(raw, 7.5), p2);
  EXPECT_EQ(tca::read_text_file(p1), tca::read_text_file(p2));
}

TEST(AttentionCsvTest, RoundTripIsBitExact) {
  Rng rng(6);
  Matrix a = tca::row_softmax(tca::rng_fill(rng, 4, 7, tca::Dist::uniform(-2, 2)));
  const auto path = (temp_dir() / "attention.csv").string();
  tca::export_attention_csv(a, path);
  Matrix back = tca::read_matrix_csv(path);
  EXPECT_EQ(a, back);
}

TEST(MedianTest, OddAndEven) {
  EXPECT_EQ(tca::median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(tca::median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_THROW(tca::median({}), tca::Error);
}
