#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "tca/rng.hpp"

namespace tca {

// Dense row-major matrix of 64-bit reals. Rows index time, columns index
// features, everywhere in this library.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols);  // zero-filled
  Matrix(int rows, int cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix zeros(int rows, int cols) { return Matrix(rows, cols); }
  static Matrix identity(int n);
  static Matrix constant(int rows, int cols, double value);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  double* row_ptr(int r) { return data_.data() + static_cast<std::size_t>(r) * cols_; }
  const double* row_ptr(int r) const { return data_.data() + static_cast<std::size_t>(r) * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_str() const;

  bool all_finite() const;

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Standard product. Accumulation order is fixed: output rows in order, and
// for each entry the sum over the inner index runs left to right, so results
// are bit-reproducible run to run. Throws ShapeError naming both shapes.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);

// a + row vector b broadcast onto every row of a. b must be 1 x a.cols().
Matrix add_row_broadcast(const Matrix& a, const Matrix& b);

// 1 x cols matrix of column sums.
Matrix col_sums(const Matrix& a);

double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Numerically stable per-row softmax (max subtraction; ties in the max
// resolve to the first index).
Matrix row_softmax(const Matrix& x);

// Vector-Jacobian product of row_softmax: given a = row_softmax(e) and the
// gradient da w.r.t. a, returns the gradient w.r.t. e:
//   de_i = a_i * (da_i - sum_j da_j * a_j)   per row.
Matrix row_softmax_vjp(const Matrix& a, const Matrix& da);

// Distribution request for rng_fill.
struct Dist {
  enum class Kind { Uniform, Normal, Glorot };
  Kind kind = Kind::Uniform;
  double a = 0.0;  // uniform lo / normal mu
  double b = 1.0;  // uniform hi / normal sigma
  int fan_in = 0;
  int fan_out = 0;

  static Dist uniform(double lo, double hi) { return {Kind::Uniform, lo, hi, 0, 0}; }
  static Dist normal(double mu, double sigma) { return {Kind::Normal, mu, sigma, 0, 0}; }
  // Uniform in +-sqrt(6 / (fan_in + fan_out)).
  static Dist glorot(int fan_in, int fan_out) { return {Kind::Glorot, 0, 0, fan_in, fan_out}; }
};

// Fills row-major, one draw per entry, deterministic given the Rng state.
Matrix rng_fill(Rng& rng, int rows, int cols, const Dist& dist);

}  // namespace tca
