#include <doctest.h>

#include <cmath>
#include <complex>

#include "core/cmat.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

using namespace soiltag;

namespace {

CMat random_hermitian(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  CMat a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a.at(i, i) = {rng.normal(), 0.0};
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx z{rng.normal(), rng.normal()};
      a.at(i, j) = z;
      a.at(j, i) = std::conj(z);
    }
  }
  return a;
}

double reconstruction_error(const CMat& a, const EigResult& eig) {
  const std::size_t n = a.rows;
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cplx sum{};
      for (std::size_t k = 0; k < n; ++k) {
        sum += eig.vectors.at(i, k) * eig.values[k] * std::conj(eig.vectors.at(j, k));
      }
      err += std::norm(sum - a.at(i, j));
    }
  }
  return std::sqrt(err);
}

}  // namespace

TEST_CASE("diagonal matrices are their own decomposition") {
  CMat a(3, 3);
  a.at(0, 0) = 2.0;
  a.at(1, 1) = -1.0;
  a.at(2, 2) = 5.0;
  const EigResult eig = eig_hermitian(a);
  CHECK(eig.values[0] == doctest::Approx(-1.0));
  CHECK(eig.values[1] == doctest::Approx(2.0));
  CHECK(eig.values[2] == doctest::Approx(5.0));
}

TEST_CASE("known 2x2 Hermitian pair") {
  // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
  CMat a(2, 2);
  a.at(0, 0) = 2.0;
  a.at(0, 1) = {0.0, 1.0};
  a.at(1, 0) = {0.0, -1.0};
  a.at(1, 1) = 2.0;
  const EigResult eig = eig_hermitian(a);
  CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.values[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("random matrices reconstruct and give orthonormal vectors") {
  for (std::size_t n : {2, 4, 8}) {
    for (std::uint64_t seed : {11u, 22u, 33u}) {
      const CMat a = random_hermitian(n, seed);
      const EigResult eig = eig_hermitian(a);

      CHECK(reconstruction_error(a, eig) < 1e-10);
      for (std::size_t k = 1; k < n; ++k) CHECK(eig.values[k] >= eig.values[k - 1]);

      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
          cplx dot{};
          for (std::size_t i = 0; i < n; ++i) {
            dot += std::conj(eig.vectors.at(i, p)) * eig.vectors.at(i, q);
          }
          CHECK(std::abs(dot - (p == q ? 1.0 : 0.0)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("rank-one outer product yields a single non-zero eigenvalue") {
  // v v^H with |v|^2 = 3.
  CMat a(3, 3);
  const cplx v[3] = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) a.at(i, j) = v[i] * std::conj(v[j]);
  }
  const EigResult eig = eig_hermitian(a);
  CHECK(std::abs(eig.values[0]) < 1e-12);
  CHECK(std::abs(eig.values[1]) < 1e-12);
  CHECK(eig.values[2] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("non-square input is rejected") {
  CHECK_THROWS_AS(eig_hermitian(CMat(2, 3)), ShapeError);
}
