#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace gosbounds {

/// Dense row-major square matrix, sized for the r x r phase generators used
/// here (r is at most a few dozen).
class SquareMatrix {
 public:
  explicit SquareMatrix(std::size_t n = 0) : n_(n), a_(n * n, 0.0) {}

  static SquareMatrix identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  SquareMatrix operator*(const SquareMatrix& b) const {
    SquareMatrix c(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < n_; ++k) {
        const double aik = (*this)(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < n_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  SquareMatrix& operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
  }

  SquareMatrix& operator+=(const SquareMatrix& b) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += b.a_[i];
    return *this;
  }

  /// Maximum absolute column sum.
  double norm1() const {
    double best = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n_; ++i) s += std::abs((*this)(i, j));
      best = std::max(best, s);
    }
    return best;
  }

  /// Row vector v^T * A.
  std::vector<double> left_multiply(const std::vector<double>& v) const {
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      if (v[i] == 0.0) continue;
      for (std::size_t j = 0; j < n_; ++j) out[j] += v[i] * (*this)(i, j);
    }
    return out;
  }

 private:
  std::size_t n_;
  std::vector<double> a_;
};

/// exp(A) by scaling and squaring: scale A by 2^-s until ||A||_1 <= 1/2,
/// sum the Taylor series, then square s times. The series always runs past
/// n terms so that entries of a triangular A which first appear at power
/// n - 1 keep full relative accuracy.
inline SquareMatrix expm(SquareMatrix a) {
  const std::size_t n = a.size();
  const double norm = a.norm1();
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  a *= std::ldexp(1.0, -s);

  SquareMatrix result = SquareMatrix::identity(n);
  SquareMatrix term = SquareMatrix::identity(n);
  const int terms = static_cast<int>(n) + 24;
  for (int k = 1; k <= terms; ++k) {
    term = term * a;
    term *= 1.0 / k;
    result += term;
  }
  for (int i = 0; i < s; ++i) result = result * result;
  return result;
}

}  // namespace gosbounds
