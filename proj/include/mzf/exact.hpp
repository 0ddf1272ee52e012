#pragma once

// Exact rational arithmetic helpers used by golden computations.

#include <boost/rational.hpp>

#include <cstdint>
#include <vector>

#include "mzf/modarith.hpp"

namespace mzf {

using Rational = boost::rational<std::int64_t>;

template <class I>
struct scalar_ops<boost::rational<I>> {
  static boost::rational<I> floor(const boost::rational<I>& v) {
    I n = v.numerator();
    const I d = v.denominator();  // always > 0
    I q = n / d;
    if (n % d != 0 && n < 0) --q;
    return boost::rational<I>(q);
  }
};

/// Dense row-major rational matrix, just enough for small golden examples.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

  static RationalMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
    RationalMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int r = 0; r < m.rows_; ++r)
      for (int c = 0; c < m.cols_; ++c) m(r, c) = Rational(rows[r][c]);
    return m;
  }

  static RationalMatrix identity(int n) {
    RationalMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Rational(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int r, int c) { return data_[r * cols_ + c]; }
  const Rational& operator()(int r, int c) const { return data_[r * cols_ + c]; }

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    RationalMatrix out(a.rows_, b.cols_);
    for (int r = 0; r < a.rows_; ++r)
      for (int c = 0; c < b.cols_; ++c) {
        Rational s(0);
        for (int i = 0; i < a.cols_; ++i) s += a(r, i) * b(i, c);
        out(r, c) = s;
      }
    return out;
  }

  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  /// Gauss-Jordan inverse; returns false when singular.
  bool inverse(RationalMatrix& out) const {
    const int n = rows_;
    RationalMatrix a = *this;
    out = identity(n);
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      for (int r = col; r < n; ++r)
        if (a(r, col).numerator() != 0) {
          piv = r;
          break;
        }
      if (piv < 0) return false;
      for (int c = 0; c < n; ++c) {
        std::swap(a(col, c), a(piv, c));
        std::swap(out(col, c), out(piv, c));
      }
      const Rational inv = Rational(1) / a(col, col);
      for (int c = 0; c < n; ++c) {
        a(col, c) *= inv;
        out(col, c) *= inv;
      }
      for (int r = 0; r < n; ++r) {
        if (r == col || a(r, col).numerator() == 0) continue;
        const Rational f = a(r, col);
        for (int c = 0; c < n; ++c) {
          a(r, c) -= f * a(col, c);
          out(r, c) -= f * out(col, c);
        }
      }
    }
    return true;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> data_;
};

}  // namespace mzf
