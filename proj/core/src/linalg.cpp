#include "uavris/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uavris {

CMat CMat::identity(int n) {
  CMat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

CMat matmul(const CMat& a, const CMat& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
  CMat out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const cplx aik = a.at(i, k);
      if (aik == cplx{}) continue;
      for (int j = 0; j < b.cols; ++j) out.at(i, j) += aik * b.at(k, j);
    }
  }
  return out;
}

CMat adjoint(const CMat& a) {
  CMat out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) out.at(j, i) = std::conj(a.at(i, j));
  return out;
}

CMat solve(const CMat& a, const CMat& b) {
  if (a.rows != a.cols) throw std::invalid_argument("solve: A must be square");
  if (a.rows != b.rows) throw std::invalid_argument("solve: shape mismatch");
  const int n = a.rows;
  CMat lu = a;
  CMat x = b;

  double scale = 0.0;
  for (const auto& v : lu.data) scale = std::max(scale, std::abs(v));
  const double pivot_floor = scale * n * 1e-300 + 1e-300;

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(lu.at(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(lu.at(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best <= pivot_floor)
      throw SingularMatrixError("solve: matrix is singular to working precision");
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(lu.at(col, j), lu.at(pivot, j));
      for (int j = 0; j < x.cols; ++j) std::swap(x.at(col, j), x.at(pivot, j));
    }
    const cplx inv_piv = 1.0 / lu.at(col, col);
    for (int r = col + 1; r < n; ++r) {
      const cplx f = lu.at(r, col) * inv_piv;
      if (f == cplx{}) continue;
      lu.at(r, col) = 0.0;
      for (int j = col + 1; j < n; ++j) lu.at(r, j) -= f * lu.at(col, j);
      for (int j = 0; j < x.cols; ++j) x.at(r, j) -= f * x.at(col, j);
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    const cplx inv_piv = 1.0 / lu.at(col, col);
    for (int j = 0; j < x.cols; ++j) {
      cplx acc = x.at(col, j);
      for (int k = col + 1; k < n; ++k) acc -= lu.at(col, k) * x.at(k, j);
      x.at(col, j) = acc * inv_piv;
    }
  }
  return x;
}

CMat inverse(const CMat& a) { return solve(a, CMat::identity(a.rows)); }

double frobenius_norm(const CMat& a) {
  double acc = 0.0;
  for (const auto& v : a.data) acc += std::norm(v);
  return std::sqrt(acc);
}

double norm1(const CMat& a) {
  double best = 0.0;
  for (int j = 0; j < a.cols; ++j) {
    double col = 0.0;
    for (int i = 0; i < a.rows; ++i) col += std::abs(a.at(i, j));
    best = std::max(best, col);
  }
  return best;
}

double condition_1(const CMat& a) {
  try {
    return norm1(a) * norm1(inverse(a));
  } catch (const SingularMatrixError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace uavris
