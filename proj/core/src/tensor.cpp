#include "pnnkit/tensor.hpp"

namespace pnnkit {

Matrix affine_transposed(const Matrix& a, const Matrix& w,
                         const std::vector<double>& bias) {
  Matrix out(a.rows, w.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* oi = out.row(i);
    for (std::size_t j = 0; j < w.rows; ++j) {
      const double* wj = w.row(j);
      double acc = bias.empty() ? 0.0 : bias[j];
      for (std::size_t k = 0; k < a.cols; ++k) acc += ai[k] * wj[k];
      oi[j] = acc;
    }
  }
  return out;
}

Matrix transpose_times(const Matrix& dz, const Matrix& a) {
  Matrix out(dz.cols, a.cols);
  for (std::size_t i = 0; i < dz.rows; ++i) {
    const double* di = dz.row(i);
    const double* ai = a.row(i);
    for (std::size_t j = 0; j < dz.cols; ++j) {
      const double g = di[j];
      if (g == 0.0) continue;
      double* oj = out.row(j);
      for (std::size_t k = 0; k < a.cols; ++k) oj[k] += g * ai[k];
    }
  }
  return out;
}

Matrix times(const Matrix& dz, const Matrix& w) {
  Matrix out(dz.rows, w.cols);
  for (std::size_t i = 0; i < dz.rows; ++i) {
    const double* di = dz.row(i);
    double* oi = out.row(i);
    for (std::size_t j = 0; j < dz.cols; ++j) {
      const double g = di[j];
      if (g == 0.0) continue;
      const double* wj = w.row(j);
      for (std::size_t k = 0; k < w.cols; ++k) oi[k] += g * wj[k];
    }
  }
  return out;
}

std::vector<double> column_sums(const Matrix& m) {
  std::vector<double> out(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* mi = m.row(i);
    for (std::size_t j = 0; j < m.cols; ++j) out[j] += mi[j];
  }
  return out;
}

}  // namespace pnnkit
