#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/cmat.hpp"
#include "core/errors.hpp"

namespace soiltag {

namespace {

double off_diag_norm(const CMat& a) {
  double s = 0.0;
  for (std::size_t p = 0; p < a.rows; ++p) {
    for (std::size_t q = p + 1; q < a.cols; ++q) {
      s += std::norm(a.at(p, q));
    }
  }
  return std::sqrt(s);
}

}  // namespace

EigResult eig_hermitian(CMat a) {
  check_shape(a.rows == a.cols && a.rows > 0, "eigendecomposition needs a square matrix");
  const std::size_t n = a.rows;
  CMat v = CMat::identity(n);

  double frob = 0.0;
  for (const cplx& z : a.data) frob += std::norm(z);
  frob = std::sqrt(frob);
  const double tol = 1e-14 * std::max(frob, 1e-300);

  constexpr int kMaxSweeps = 60;
  for (int sweep = 0; sweep < kMaxSweeps && off_diag_norm(a) > tol; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a.at(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;

        // Align the pivot phase, then rotate the real 2x2 block.
        const cplx phase = apq / mag;  // e^{i*phi}
        const double app = a.at(p, p).real();
        const double aqq = a.at(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // U(p,p)=c, U(p,q)=s, U(q,p)=-s*conj(phase), U(q,q)=c*conj(phase)
        const cplx uqp = -s * std::conj(phase);
        const cplx uqq = c * std::conj(phase);

        // A := A * U (columns p and q)
        for (std::size_t i = 0; i < n; ++i) {
          const cplx aip = a.at(i, p);
          const cplx aiq = a.at(i, q);
          a.at(i, p) = aip * c + aiq * uqp;
          a.at(i, q) = aip * s + aiq * uqq;
        }
        // A := U^H * A (rows p and q)
        for (std::size_t j = 0; j < n; ++j) {
          const cplx apj = a.at(p, j);
          const cplx aqj = a.at(q, j);
          a.at(p, j) = c * apj + std::conj(uqp) * aqj;
          a.at(q, j) = s * apj + std::conj(uqq) * aqj;
        }
        // V := V * U
        for (std::size_t i = 0; i < n; ++i) {
          const cplx vip = v.at(i, p);
          const cplx viq = v.at(i, q);
          v.at(i, p) = vip * c + viq * uqp;
          v.at(i, q) = vip * s + viq * uqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a.at(i, i).real() < a.at(j, j).real();
  });

  EigResult res;
  res.values.resize(n);
  res.vectors = CMat(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    res.values[k] = a.at(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) {
      res.vectors.at(i, k) = v.at(i, order[k]);
    }
  }
  return res;
}

}  // namespace soiltag
