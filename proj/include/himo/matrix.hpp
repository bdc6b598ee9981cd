#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace himo {

/// Dense row-major matrix of doubles. The universal currency between
/// modules: embedding batches, PCA bases, gradients, similarity matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& values() const { return data_; }

  bool all_finite() const;
  // Throws std::invalid_argument naming `what` if any entry is NaN/Inf.
  void require_finite(const char* what) const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// c = a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// c = a * b^T  (rows of b as right factors; the common case for row bases)
Matrix matmul_transposed(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// Componentwise arithmetic mean of the rows.
std::vector<double> mean_rows(const Matrix& a);

double max_abs_diff(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& a);

// Little-endian binary format: rows u64, cols u64, then rows*cols f64.
void save_matrix(const Matrix& m, const std::string& path);
Matrix load_matrix(const std::string& path);
void write_matrix(const Matrix& m, std::ostream& out);
Matrix read_matrix(std::istream& in);

}  // namespace himo
