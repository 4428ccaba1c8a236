#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace survc {

/// Dense row-major matrix of doubles. Just enough linear-algebra surface for
/// covariate handling; heavy math stays in flat loops elsewhere.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = data_[i * cols_ + j];
    return out;
  }

  /// New matrix keeping only the given columns, in the given order.
  Matrix select_columns(const std::vector<std::size_t>& cols) const {
    Matrix out(rows_, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j] >= cols_) throw std::out_of_range("column index out of range");
      for (std::size_t i = 0; i < rows_; ++i) out(i, j) = (*this)(i, cols[j]);
    }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace survc
