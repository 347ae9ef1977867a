#include "hardexc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace hardexc::linalg {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

std::vector<double> Matrix::apply(std::span<const double> x) const {
  std::vector<double> y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
  return y;
}

Lu::Lu(const Matrix& a) : n_(a.rows()), lu_(a.data().begin(), a.data().end()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("Lu: not square");
  perm_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
  const double scale = std::max(a.norm_inf(), 1e-300);
  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n_; ++i)
      if (std::abs(lu_[i * n_ + k]) > std::abs(lu_[piv * n_ + k])) piv = i;
    if (piv != k) {
      for (std::size_t j = 0; j < n_; ++j)
        std::swap(lu_[k * n_ + j], lu_[piv * n_ + j]);
      std::swap(perm_[k], perm_[piv]);
      sign_ = -sign_;
    }
    const double p = lu_[k * n_ + k];
    if (std::abs(p) <= 1e-14 * scale) {
      singular_ = true;
      continue;
    }
    for (std::size_t i = k + 1; i < n_; ++i) {
      const double f = lu_[i * n_ + k] / p;
      lu_[i * n_ + k] = f;
      for (std::size_t j = k + 1; j < n_; ++j)
        lu_[i * n_ + j] -= f * lu_[k * n_ + j];
    }
  }
}

std::vector<double> Lu::solve(std::span<const double> rhs) const {
  if (singular_) throw std::runtime_error("Lu::solve on singular matrix");
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = rhs[perm_[i]];
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= lu_[i * n_ + j] * x[j];
  for (std::size_t i = n_; i-- > 0;) {
    for (std::size_t j = i + 1; j < n_; ++j) x[i] -= lu_[i * n_ + j] * x[j];
    x[i] /= lu_[i * n_ + i];
  }
  return x;
}

double Lu::determinant() const {
  double d = sign_;
  for (std::size_t i = 0; i < n_; ++i) d *= lu_[i * n_ + i];
  return d;
}

namespace {

// 1-based accessor over a row-major n x n buffer.
struct One {
  std::vector<double>& a;
  std::size_t n;
  double& operator()(std::size_t i, std::size_t j) {
    return a[(i - 1) * n + (j - 1)];
  }
};

void balance(One A) {
  constexpr double radix = 2.0, sqrdx = radix * radix;
  const std::size_t n = A.n;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 1; i <= n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 1; j <= n; ++j)
        if (j != i) {
          c += std::abs(A(j, i));
          r += std::abs(A(i, j));
        }
      if (c != 0.0 && r != 0.0) {
        double g = r / radix, f = 1.0;
        const double s = c + r;
        while (c < g) {
          f *= radix;
          c *= sqrdx;
        }
        g = r * radix;
        while (c > g) {
          f /= radix;
          c /= sqrdx;
        }
        if ((c + r) / f < 0.95 * s) {
          done = false;
          g = 1.0 / f;
          for (std::size_t j = 1; j <= n; ++j) A(i, j) *= g;
          for (std::size_t j = 1; j <= n; ++j) A(j, i) *= f;
        }
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transforms; entries below the subdiagonal are cleared afterwards.
void hessenberg(One A) {
  const std::size_t n = A.n;
  for (std::size_t m = 2; m < n; ++m) {
    double x = 0.0;
    std::size_t i = m;
    for (std::size_t j = m; j <= n; ++j)
      if (std::abs(A(j, m - 1)) > std::abs(x)) {
        x = A(j, m - 1);
        i = j;
      }
    if (i != m) {
      for (std::size_t j = m - 1; j <= n; ++j) std::swap(A(i, j), A(m, j));
      for (std::size_t j = 1; j <= n; ++j) std::swap(A(j, i), A(j, m));
    }
    if (x != 0.0) {
      for (i = m + 1; i <= n; ++i) {
        double y = A(i, m - 1);
        if (y != 0.0) {
          y /= x;
          A(i, m - 1) = y;
          for (std::size_t j = m; j <= n; ++j) A(i, j) -= y * A(m, j);
          for (std::size_t j = 1; j <= n; ++j) A(j, m) += y * A(j, i);
        }
      }
    }
  }
  for (std::size_t i = 3; i <= n; ++i)
    for (std::size_t j = 1; j + 1 < i; ++j) A(i, j) = 0.0;
}

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix.
void hessenberg_qr(One a, std::vector<double>& wr, std::vector<double>& wi) {
  const int n = static_cast<int>(a.n);
  auto A = [&a](int i, int j) -> double& {
    return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };
  double anorm = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(A(i, j));

  int nn = n, l = 1;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, w = 0.0, x = 0.0, y = 0.0,
         z = 0.0;
  while (nn >= 1) {
    int its = 0;
    do {
      for (l = nn; l >= 2; --l) {
        s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(A(l, l - 1)) + s == s) {
          A(l, l - 1) = 0.0;
          break;
        }
      }
      x = A(nn, nn);
      if (l == nn) {
        wr[nn - 1] = x + t;
        wi[nn - 1] = 0.0;
        --nn;
      } else {
        y = A(nn - 1, nn - 1);
        w = A(nn, nn - 1) * A(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wr[nn - 2] = wr[nn - 1] = x + z;
            if (z != 0.0) wr[nn - 1] = x - w / z;
            wi[nn - 2] = wi[nn - 1] = 0.0;
          } else {
            wr[nn - 2] = wr[nn - 1] = x + p;
            wi[nn - 2] = -z;
            wi[nn - 1] = z;
          }
          nn -= 2;
        } else {
          if (its == 60) throw EigenError("QR iteration did not converge");
          if (its == 10 || its == 20 || its == 40) {
            t += x;
            for (int i = 1; i <= nn; ++i) A(i, i) -= x;
            s = std::abs(A(nn, nn - 1)) + std::abs(A(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = A(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / A(m + 1, m) + A(m, m + 1);
            q = A(m + 1, m + 1) - z - r - s;
            r = A(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(A(m - 1, m - 1)) +
                                            std::abs(z) +
                                            std::abs(A(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            A(i, i - 2) = 0.0;
            if (i != m + 2) A(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = A(k, k - 1);
              q = A(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = A(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m) A(k, k - 1) = -A(k, k - 1);
              } else {
                A(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = A(k, j) + q * A(k + 1, j);
                if (k != nn - 1) {
                  p += r * A(k + 2, j);
                  A(k + 2, j) -= p * z;
                }
                A(k + 1, j) -= p * y;
                A(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * A(i, k) + y * A(i, k + 1);
                if (k != nn - 1) {
                  p += z * A(i, k + 2);
                  A(i, k + 2) -= p * r;
                }
                A(i, k + 1) -= p * q;
                A(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }
}

}  // namespace

std::vector<Complex> eigenvalues(const Matrix& a) {
  if (a.rows() != a.cols()) throw EigenError("eigenvalues: not square");
  const std::size_t n = a.rows();
  for (double v : a.data())
    if (!std::isfinite(v)) throw EigenError("eigenvalues: non-finite input");
  std::vector<double> buf(a.data().begin(), a.data().end());
  One A{buf, n};
  balance(A);
  hessenberg(A);
  std::vector<double> wr(n), wi(n);
  hessenberg_qr(A, wr, wi);
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
  return out;
}

namespace {

// Complex Gaussian elimination with partial pivoting; solves M x = b in
// place.  Tiny pivots are nudged so inverse iteration can proceed.
void complex_solve(std::vector<Complex>& m, std::vector<Complex>& b,
                   std::size_t n, double tiny) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m[i * n + k]) > std::abs(m[piv * n + k])) piv = i;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    if (std::abs(m[k * n + k]) < tiny) m[k * n + k] = tiny;
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = m[i * n + k] / m[k * n + k];
      for (std::size_t j = k; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
      b[i] -= f * b[k];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) b[i] -= m[i * n + j] * b[j];
    b[i] /= m[i * n + i];
  }
}

void normalize(std::vector<Complex>& v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  s = std::sqrt(s);
  if (s > 0.0)
    for (auto& c : v) c /= s;
}

}  // namespace

std::vector<Complex> eigenvector(const Matrix& a, Complex lambda) {
  const std::size_t n = a.rows();
  const double scale = std::max(a.norm_inf(), 1e-300);
  const double tiny = 1e-14 * scale;
  std::vector<Complex> v(n);
  // Deterministic, generic (non-symmetric) start vector.
  for (std::size_t i = 0; i < n; ++i)
    v[i] = Complex(1.0 + 0.1 * double(i), 0.05 * double(i * i));
  normalize(v);
  for (int it = 0; it < 3; ++it) {
    std::vector<Complex> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m[i * n + j] = Complex(a(i, j), 0.0) - (i == j ? lambda : 0.0);
    complex_solve(m, v, n, tiny);
    normalize(v);
  }
  return v;
}

double eigen_residual(const Matrix& a, Complex lambda,
                      std::span<const Complex> v) {
  const std::size_t n = a.rows();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Complex acc = -lambda * v[i];
    for (std::size_t j = 0; j < n; ++j) acc += a(i, j) * v[j];
    s += std::norm(acc);
  }
  return std::sqrt(s);
}

}  // namespace hardexc::linalg
