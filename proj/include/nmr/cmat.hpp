#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "nmr/kernels.hpp"

namespace nmr {

using cd = std::complex<double>;

// Dense row-major complex matrix. Sized for spin systems up to 2^7 = 128;
// multiplication routes through the runtime-selected kernel backend.
class CMat {
public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), d_(rows * cols) {}

  static CMat zeros(std::size_t r, std::size_t c) { return CMat(r, c); }

  static CMat identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static CMat diag(const std::vector<cd>& d) {
    CMat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cd& operator()(std::size_t r, std::size_t c) { return d_[r * cols_ + c]; }
  const cd& operator()(std::size_t r, std::size_t c) const { return d_[r * cols_ + c]; }

  cd* data() { return d_.data(); }
  const cd* data() const { return d_.data(); }

  CMat dagger() const {
    CMat m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
  }

  CMat transpose() const {
    CMat m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
    return m;
  }

  CMat conjugate() const {
    CMat m(rows_, cols_);
    for (std::size_t i = 0; i < d_.size(); ++i) m.d_[i] = std::conj(d_[i]);
    return m;
  }

  cd trace() const {
    require(square(), "trace of non-square matrix");
    cd t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const cd& v : d_) s += std::norm(v);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const cd& v : d_) m = std::max(m, std::abs(v));
    return m;
  }

  CMat& operator+=(const CMat& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
    return *this;
  }

  CMat& operator-=(const CMat& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < d_.size(); ++i) d_[i] -= o.d_[i];
    return *this;
  }

  CMat& operator*=(cd s) {
    for (cd& v : d_) v *= s;
    return *this;
  }

  friend CMat operator+(CMat a, const CMat& b) { return a += b; }
  friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
  friend CMat operator*(cd s, CMat a) { return a *= s; }
  friend CMat operator*(CMat a, cd s) { return a *= s; }

  friend CMat operator*(const CMat& a, const CMat& b) {
    a.require(a.cols_ == b.rows_, "matmul shape mismatch");
    CMat c(a.rows_, b.cols_);
    kernels::matmul(a.data(), b.data(), c.data(), a.rows_, a.cols_, b.cols_);
    return c;
  }

private:
  void require(bool ok, const char* msg) const {
    if (!ok) throw std::invalid_argument(msg);
  }
  void require_same_shape(const CMat& o) const {
    require(rows_ == o.rows_ && cols_ == o.cols_, "matrix shape mismatch");
  }

  std::size_t rows_ = 0, cols_ = 0;
  std::vector<cd> d_;
};

inline CMat kron(const CMat& a, const CMat& b) {
  CMat m(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const cd v = a(ar, ac);
      if (v == cd(0.0)) continue;
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          m(ar * b.rows() + br, ac * b.cols() + bc) = v * b(br, bc);
    }
  return m;
}

inline double max_abs_diff(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff shape mismatch");
  double m = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
  return m;
}

inline bool approx_equal(const CMat& a, const CMat& b, double tol) {
  return max_abs_diff(a, b) <= tol;
}

std::string to_string(const CMat& m, int precision = 6);

}  // namespace nmr
