#pragma once

#include <cstddef>
#include <vector>

namespace pnnkit {

// Dense row-major matrix of doubles. Batches are [rows = samples].
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }

  bool empty() const { return data.empty(); }
};

// out = a * w^T + bias broadcast over rows. a is [m x k], w is [n x k].
Matrix affine_transposed(const Matrix& a, const Matrix& w,
                         const std::vector<double>& bias);

// out[j, :] = sum_i dz(i, j) * a(i, :). dz is [m x n], a is [m x k] -> [n x k].
Matrix transpose_times(const Matrix& dz, const Matrix& a);

// out = dz * w. dz is [m x n], w is [n x k] -> [m x k].
Matrix times(const Matrix& dz, const Matrix& w);

std::vector<double> column_sums(const Matrix& m);

}  // namespace pnnkit
