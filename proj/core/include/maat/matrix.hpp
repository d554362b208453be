#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "maat/errors.hpp"

namespace maat {

/// Owning row-major feature matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const {
    return values[r * cols + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
  std::span<double> row(std::size_t r) {
    return {values.data() + r * cols, cols};
  }

  void push_row(std::span<const double> row_values) {
    if (cols == 0) {
      cols = row_values.size();
    } else if (row_values.size() != cols) {
      throw ValidationError("matrix row length " +
                            std::to_string(row_values.size()) +
                            " does not match width " + std::to_string(cols));
    }
    values.insert(values.end(), row_values.begin(), row_values.end());
    ++rows;
  }
};

/// Non-owning row-major view used by the learners.
class DataView {
 public:
  DataView() = default;
  DataView(const double* data, std::size_t rows, std::size_t cols)
      : data_(data), rows_(rows), cols_(cols) {}
  DataView(const Matrix& m) : DataView(m.values.data(), m.rows, m.cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double at(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data_ + r * cols_, cols_};
  }

 private:
  const double* data_ = nullptr;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

}  // namespace maat
