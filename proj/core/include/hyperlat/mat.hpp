#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperlat/int_types.hpp"

namespace hyperlat {

// Dense row-major matrix over an exact scalar (Int or Rat).
template <typename T>
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}
  Mat(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    a_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw std::invalid_argument("ragged matrix");
      for (const auto& x : r) a_.push_back(x);
    }
  }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }
  bool operator!=(const Mat& o) const { return !(*this == o); }

  Mat transposed() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_square() const { return rows_ == cols_; }

  bool is_symmetric() const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  bool is_zero() const {
    for (const auto& x : a_)
      if (x != T(0)) return false;
    return true;
  }

  Mat operator*(const Mat& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matmul shape");
    Mat r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const T& aik = (*this)(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < o.cols_; ++j)
          r(i, j) += aik * o(k, j);
      }
    return r;
  }

  Mat operator+(const Mat& o) const {
    check_same_shape(o);
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
  }

  Mat operator-(const Mat& o) const {
    check_same_shape(o);
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
  }

  Mat operator-() const {
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = -a_[i];
    return r;
  }

  Mat operator*(const T& s) const {
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * s;
    return r;
  }

  std::vector<T> row(std::size_t i) const {
    std::vector<T> r(cols_);
    for (std::size_t j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
    return r;
  }

  void set_row(std::size_t i, const std::vector<T>& v) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = v[j];
  }

  Mat submatrix(std::size_t r0, std::size_t c0, std::size_t nr,
                std::size_t nc) const {
    Mat s(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) s(i, j) = (*this)(r0 + i, c0 + j);
    return s;
  }

  // Rows of b appended below.
  Mat stacked(const Mat& b) const {
    if (cols_ != b.cols_ && rows_ != 0 && b.rows_ != 0)
      throw std::invalid_argument("stack shape");
    Mat r(rows_ + b.rows_, rows_ ? cols_ : b.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j);
    for (std::size_t i = 0; i < b.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) r(rows_ + i, j) = b(i, j);
    return r;
  }

  std::string str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < rows_; ++i) {
      s += i ? "; " : "";
      for (std::size_t j = 0; j < cols_; ++j) {
        if (j) s += " ";
        s += scalar_str((*this)(i, j));
      }
    }
    s += "]";
    return s;
  }

 private:
  static std::string scalar_str(const Int& x) { return x.get_str(); }
  static std::string scalar_str(const Rat& x) { return x.get_str(); }

  void check_same_shape(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument("shape mismatch");
  }

  std::size_t rows_, cols_;
  std::vector<T> a_;
};

using IMat = Mat<Int>;
using QMat = Mat<Rat>;
using IVec = std::vector<Int>;
using QVec = std::vector<Rat>;

QMat to_rat(const IMat& m);
// Throws unless every entry is integral.
IMat to_int(const QMat& m);

IVec mat_vec(const IMat& m, const IVec& v);
QVec mat_vec(const QMat& m, const QVec& v);
Int dot(const IVec& a, const IMat& gram, const IVec& b);
Rat dot(const QVec& a, const QMat& gram, const QVec& b);
Int content(const IVec& v);

// Determinant of an integer matrix, fraction-free (Bareiss).
Int det(const IMat& m);
Rat det(const QMat& m);

QMat inverse(const QMat& m);

// Characteristic polynomial coefficients c[0..n], c[n] = 1, of an integer
// matrix (Faddeev-LeVerrier; all divisions exact).
std::vector<Int> charpoly(const IMat& m);

// Row Hermite normal form H = U * A with U unimodular. Pivots positive,
// entries above a pivot reduced to [0, pivot). Zero rows last.
IMat hnf(const IMat& a, IMat* transform = nullptr);

// Basis (rows) of {x : x * A = 0}; the lattice of integer solutions, which is
// automatically saturated.
IMat left_kernel(const IMat& a);

std::size_t rank_of(const IMat& a);

// Smith normal form S = U * A * V, elementary divisors s(i,i) dividing
// s(i+1,i+1), all non-negative.
IMat snf(const IMat& a, IMat* u = nullptr, IMat* v = nullptr);

// Unimodular matrix whose first row is the given primitive vector.
IMat complete_to_unimodular(const IVec& primitive_row);

// Membership of a row vector in the row span (over Z) of a HNF basis.
bool hnf_contains(const IMat& hnf_basis, const IVec& v);

// Basis of the intersection of two full-rank lattices given by row bases
// over Q inside Q^n.
QMat lattice_intersection(const QMat& a, const QMat& b);

// Index [A : B] for B <= A of finite index (row bases over Q).
Int lattice_index(const QMat& sup, const QMat& sub);

}  // namespace hyperlat
