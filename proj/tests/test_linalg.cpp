#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <random>

#include "hardexc/linalg.hpp"

using namespace hardexc::linalg;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t n, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = d(rng);
  return m;
}

std::vector<Complex> sorted(std::vector<Complex> v) {
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  return v;
}

// Independent oracle.
std::vector<Complex> eigen_oracle(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  Eigen::EigenSolver<Eigen::MatrixXd> es(e, false);
  std::vector<Complex> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    out.push_back(es.eigenvalues()[i]);
  return out;
}

// Pairs each value with its nearest counterpart; the eigenvalues here are
// well separated.
double max_mismatch(const std::vector<Complex>& a, std::vector<Complex> b) {
  double worst = 0.0;
  for (Complex x : a) {
    auto it = std::min_element(b.begin(), b.end(), [x](Complex p, Complex q) {
      return std::abs(p - x) < std::abs(q - x);
    });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("LU solves and reports determinant") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1u, 3u, 6u, 7u}) {
    const Matrix a = random_matrix(rng, n, 1.0);
    const Lu lu(a);
    REQUIRE_FALSE(lu.singular());
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = double(i) - 1.5;
    const auto x = lu.solve(b);
    const auto ax = a.apply(x);
    for (std::size_t i = 0; i < n; ++i) CHECK(ax[i] == doctest::Approx(b[i]).epsilon(1e-12));
    Eigen::MatrixXd e(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) e(i, j) = a(i, j);
    CHECK(lu.determinant() == doctest::Approx(e.determinant()).epsilon(1e-12));
  }
}

TEST_CASE("singular matrix is flagged") {
  Matrix a(3, 3, 1.0);
  CHECK(Lu(a).singular());
}

TEST_CASE("eigenvalues agree with an independent solver") {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 6 + k % 2;
    const double scale = std::pow(10.0, (k % 13) - 3);
    const Matrix a = random_matrix(rng, n, scale);
    const auto ours = eigenvalues(a);
    REQUIRE(ours.size() == n);
    CHECK(max_mismatch(ours, eigen_oracle(a)) <= 1e-10 * a.norm_inf());
  }
}

TEST_CASE("complex eigenvalues come in conjugate pairs") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const auto ev = sorted(eigenvalues(random_matrix(rng, 6, 1.0)));
    for (Complex z : ev) {
      if (z.imag() == 0.0) continue;
      const double d = std::abs(max_mismatch({std::conj(z)}, ev));
      CHECK(d <= 1e-12 * (1.0 + std::abs(z)));
    }
  }
}

TEST_CASE("eigenvectors satisfy the defining relation") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 50; ++k) {
    const Matrix a = random_matrix(rng, 6, 1e9);
    for (Complex l : eigenvalues(a)) {
      const auto v = eigenvector(a, l);
      CHECK(eigen_residual(a, l, v) <= 1e-8 * a.norm_inf());
    }
  }
}

TEST_CASE("known spectra") {
  // Block diagonal with rotations: -1 +- 2i, -3 +- 4i, 5, -6.
  Matrix a(6, 6);
  a(0, 0) = -1; a(0, 1) = 2; a(1, 0) = -2; a(1, 1) = -1;
  a(2, 2) = -3; a(2, 3) = 4; a(3, 2) = -4; a(3, 3) = -3;
  a(4, 4) = 5; a(5, 5) = -6;
  const std::vector<Complex> expect = {{-1, 2}, {-1, -2}, {-3, 4}, {-3, -4}, {5, 0}, {-6, 0}};
  CHECK(max_mismatch(eigenvalues(a), expect) <= 1e-14);
  CHECK(max_mismatch(eigenvalues(Matrix::identity(4)), {1, 1, 1, 1}) <= 1e-15);
}

}
