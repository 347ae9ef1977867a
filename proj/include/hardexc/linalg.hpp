#pragma once

// Small dense linear algebra: row-major matrices, LU with partial pivoting,
// and a nonsymmetric eigensolver (balancing, Hessenberg reduction, shifted
// QR) sized for the 6x6 linearizations handled here.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hardexc::linalg {

using Complex = std::complex<double>;

class EigenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  std::span<const double> data() const { return data_; }

  /// Max absolute row sum.
  double norm_inf() const;
  std::vector<double> apply(std::span<const double> x) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// LU factorization with partial pivoting.
class Lu {
 public:
  explicit Lu(const Matrix& a);

  /// True when a pivot fell below 1e-14 of the matrix norm.
  bool singular() const { return singular_; }
  std::vector<double> solve(std::span<const double> rhs) const;
  double determinant() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  bool singular_ = false;
};

/// All eigenvalues of a square real matrix.  Throws EigenError if the QR
/// iteration fails to converge.
std::vector<Complex> eigenvalues(const Matrix& a);

/// Unit-norm eigenvector for a computed eigenvalue, by inverse iteration.
std::vector<Complex> eigenvector(const Matrix& a, Complex lambda);

/// ||(A - lambda I) v||_2 for a complex vector v.
double eigen_residual(const Matrix& a, Complex lambda,
                      std::span<const Complex> v);

}  // namespace hardexc::linalg
