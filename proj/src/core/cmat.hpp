#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace soiltag {

using cplx = std::complex<double>;

// Dense row-major complex matrix. Array processing here never exceeds
// 8x8 covariances plus tall snapshot blocks, so no linear-algebra
// dependency is warranted.
struct CMat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<cplx> data;

  CMat() = default;
  CMat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  cplx& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const cplx& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  static CMat identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }
};

struct EigResult {
  std::vector<double> values;  // ascending
  CMat vectors;                // column k pairs with values[k]
};

// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations
// (phase-aligned 2x2 real rotations). Intended for the small spatial
// covariances of linear arrays.
EigResult eig_hermitian(CMat a);

}  // namespace soiltag
