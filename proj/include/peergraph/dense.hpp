#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace peergraph {

// Column-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) { return std::span(data_).subspan(j * rows_, rows_); }
  std::span<const double> col(std::size_t j) const { return std::span(data_).subspan(j * rows_, rows_); }
  std::span<const double> data() const { return data_; }

  double column_sum(std::size_t j) const {
    double s = 0.0;
    for (double v : col(j)) s += v;
    return s;
  }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

}  // namespace peergraph
