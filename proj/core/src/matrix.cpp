#include "tca/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "tca/error.hpp"

namespace tca {

namespace {

void require_positive_shape(int rows, int cols) {
  if (rows <= 0 || cols <= 0) {
    throw ShapeError("matrix shape must be positive, got " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
}

}  // namespace

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
  require_positive_shape(rows, cols);
  data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

Matrix::Matrix(int rows, int cols, std::vector<double> data) : rows_(rows), cols_(cols) {
  require_positive_shape(rows, cols);
  if (data.size() != static_cast<std::size_t>(rows) * cols) {
    throw ShapeError("matrix data length " + std::to_string(data.size()) +
                     " does not match shape " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  data_ = std::move(data);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
  require_positive_shape(rows_, cols_);
  data_.reserve(static_cast<std::size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) {
      throw ShapeError("ragged initializer: expected " + std::to_string(cols_) +
                       " columns, got " + std::to_string(r.size()));
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix Matrix::constant(int rows, int cols, double value) {
  Matrix m(rows, cols);
  for (double& v : m.data_) v = value;
  return m;
}

std::string Matrix::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: lhs " + a.shape_str() + " incompatible with rhs " + b.shape_str());
  }
  const int r = a.rows(), k_dim = a.cols(), c = b.cols();
  Matrix out(r, c);
  // i-k-j order: per output entry the k-sum still runs left to right, so
  // this is bit-identical to the naive triple loop while staying cache
  // friendly.
  for (int i = 0; i < r; ++i) {
    double* out_row = out.row_ptr(i);
    const double* a_row = a.row_ptr(i);
    for (int k = 0; k < k_dim; ++k) {
      const double aik = a_row[k];
      const double* b_row = b.row_ptr(k);
      for (int j = 0; j < c; ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.at(j, i) = a.at(i, j);
  return out;
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape " + a.shape_str() + " vs " + b.shape_str());
  }
}

}  // namespace

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix out = a;
  for (int i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "sub");
  Matrix out = a;
  for (int i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  Matrix out = a;
  for (int i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
  return out;
}

Matrix scale(const Matrix& a, double s) {
  Matrix out = a;
  for (double& v : out.data()) v *= s;
  return out;
}

Matrix add_row_broadcast(const Matrix& a, const Matrix& b) {
  if (b.rows() != 1 || b.cols() != a.cols()) {
    throw ShapeError("add_row_broadcast: " + a.shape_str() + " with row " + b.shape_str());
  }
  Matrix out = a;
  for (int i = 0; i < a.rows(); ++i) {
    double* row = out.row_ptr(i);
    for (int j = 0; j < a.cols(); ++j) row[j] += b.at(0, j);
  }
  return out;
}

Matrix col_sums(const Matrix& a) {
  Matrix out(1, a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const double* row = a.row_ptr(i);
    for (int j = 0; j < a.cols(); ++j) out.at(0, j) += row[j];
  }
  return out;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::fabs(v));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
  return m;
}

Matrix row_softmax(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    const double* in = x.row_ptr(i);
    double* o = out.row_ptr(i);
    double mx = in[0];
    for (int j = 1; j < x.cols(); ++j) {
      if (in[j] > mx) mx = in[j];  // strict >: ties keep the first index
    }
    double sum = 0.0;
    for (int j = 0; j < x.cols(); ++j) {
      o[j] = std::exp(in[j] - mx);
      sum += o[j];
    }
    for (int j = 0; j < x.cols(); ++j) o[j] /= sum;
  }
  return out;
}

Matrix row_softmax_vjp(const Matrix& a, const Matrix& da) {
  require_same_shape(a, da, "row_softmax_vjp");
  Matrix out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const double* ar = a.row_ptr(i);
    const double* dr = da.row_ptr(i);
    double* o = out.row_ptr(i);
    double dot = 0.0;
    for (int j = 0; j < a.cols(); ++j) dot += dr[j] * ar[j];
    for (int j = 0; j < a.cols(); ++j) o[j] = ar[j] * (dr[j] - dot);
  }
  return out;
}

Matrix rng_fill(Rng& rng, int rows, int cols, const Dist& dist) {
  require_positive_shape(rows, cols);
  Matrix out(rows, cols);
  switch (dist.kind) {
    case Dist::Kind::Uniform:
      for (double& v : out.data()) v = rng.uniform(dist.a, dist.b);
      break;
    case Dist::Kind::Normal:
      for (double& v : out.data()) v = rng.normal(dist.a, dist.b);
      break;
    case Dist::Kind::Glorot: {
      if (dist.fan_in <= 0 || dist.fan_out <= 0) {
        throw ShapeError("glorot: fan_in and fan_out must be positive, got " +
                         std::to_string(dist.fan_in) + ", " + std::to_string(dist.fan_out));
      }
      const double limit = std::sqrt(6.0 / (dist.fan_in + dist.fan_out));
      for (double& v : out.data()) v = rng.uniform(-limit, limit);
      break;
    }
  }
  return out;
}

}  // namespace tca
