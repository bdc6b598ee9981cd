#include "himo/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "himo/kernels.hpp"

namespace himo {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("Matrix: data length does not match rows*cols");
  }
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

void Matrix::require_finite(const char* what) const {
  if (!all_finite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      kernels::axpy(a(i, k), b.row(k).data(), c.row(i).data(), b.cols());
    }
  }
  return c;
}

Matrix matmul_transposed(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("matmul_transposed: shape mismatch");
  }
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      c(i, j) = kernels::dot(a.row(i).data(), b.row(j).data(), a.cols());
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

std::vector<double> mean_rows(const Matrix& a) {
  if (a.rows() == 0) throw std::invalid_argument("mean_rows: empty matrix");
  std::vector<double> mean(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    kernels::axpy(1.0, a.row(i).data(), mean.data(), a.cols());
  }
  kernels::scale(1.0 / static_cast<double>(a.rows()), mean.data(), mean.size());
  return mean;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

double frobenius_norm(const Matrix& a) {
  return std::sqrt(kernels::squared_norm(a.data(), a.size()));
}

namespace {

void write_u64_le(std::ostream& out, std::uint64_t v);
std::uint64_t read_u64_le(std::istream& in);

}  // namespace

void write_matrix(const Matrix& m, std::ostream& out) {
  write_u64_le(out, m.rows());
  write_u64_le(out, m.cols());
  // f64 payload, little-endian (matches the host on every supported target)
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Matrix read_matrix(std::istream& in) {
  const std::uint64_t rows = read_u64_le(in);
  const std::uint64_t cols = read_u64_le(in);
  std::vector<double> data(rows * cols);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!in) throw std::runtime_error("read_matrix: truncated stream");
  return Matrix(rows, cols, std::move(data));
}

void save_matrix(const Matrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_matrix: cannot open " + path);
  write_matrix(m, out);
  if (!out) throw std::runtime_error("save_matrix: write failed for " + path);
}

Matrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_matrix: cannot open " + path);
  return read_matrix(in);
}

namespace {

void write_u64_le(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint64_t read_u64_le(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw std::runtime_error("read_matrix: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

}  // namespace himo
