#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace uavris {

using cplx = std::complex<double>;

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense row-major complex matrix. Sizes in this project are tiny
// (K, L <= M <= a few dozen), so plain Gaussian elimination is plenty.
struct CMat {
  int rows = 0;
  int cols = 0;
  std::vector<cplx> data;

  CMat() = default;
  CMat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c) {}

  cplx& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  const cplx& at(int r, int c) const {
    return data[static_cast<size_t>(r) * cols + c];
  }

  static CMat identity(int n);
};

CMat matmul(const CMat& a, const CMat& b);
CMat adjoint(const CMat& a);  // conjugate transpose

// Solves A X = B in place of a copy (partial pivoting). Throws
// SingularMatrixError when a pivot falls below a scale-relative floor.
CMat solve(const CMat& a, const CMat& b);
CMat inverse(const CMat& a);

double frobenius_norm(const CMat& a);
double norm1(const CMat& a);  // max absolute column sum

// 1-norm condition estimate ||A||_1 ||A^-1||_1. Used for the ZF
// ill-conditioning cap; exactness does not matter, order of magnitude does.
double condition_1(const CMat& a);

}  // namespace uavris
