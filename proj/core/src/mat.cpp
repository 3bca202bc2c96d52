#include "hyperlat/mat.hpp"

#include <algorithm>
#include <utility>

namespace hyperlat {

QMat to_rat(const IMat& m) {
  QMat r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
  return r;
}

IMat to_int(const QMat& m) {
  IMat r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Rat& x = m(i, j);
      if (x.get_den() != 1) throw std::domain_error("to_int: non-integral");
      r(i, j) = x.get_num();
    }
  return r;
}

IVec mat_vec(const IMat& m, const IVec& v) {
  IVec r(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r[i] += m(i, j) * v[j];
  return r;
}

QVec mat_vec(const QMat& m, const QVec& v) {
  QVec r(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r[i] += m(i, j) * v[j];
  return r;
}

Int dot(const IVec& a, const IMat& gram, const IVec& b) {
  Int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    Int t = 0;
    for (std::size_t j = 0; j < b.size(); ++j) t += gram(i, j) * b[j];
    s += a[i] * t;
  }
  return s;
}

Rat dot(const QVec& a, const QMat& gram, const QVec& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    Rat t = 0;
    for (std::size_t j = 0; j < b.size(); ++j) t += gram(i, j) * b[j];
    s += a[i] * t;
  }
  return s;
}

Int content(const IVec& v) {
  Int g = 0;
  for (const auto& x : v) g = gcd(g, x);
  return g;
}

Int det(const IMat& m) {
  if (!m.is_square()) throw std::invalid_argument("det: not square");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IMat a = m;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t piv = k + 1;
      while (piv < n && a(piv, k) == 0) ++piv;
      if (piv == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a(i, j) = divexact(a(i, j) * a(k, k) - a(i, k) * a(k, j), prev);
    prev = a(k, k);
  }
  return sign > 0 ? a(n - 1, n - 1) : -a(n - 1, n - 1);
}

Rat det(const QMat& m) {
  if (!m.is_square()) throw std::invalid_argument("det: not square");
  const std::size_t n = m.rows();
  QMat a = m;
  Rat d = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && a(piv, k) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      d = -d;
    }
    d *= a(k, k);
    Rat inv = Rat(1) / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      Rat f = a(i, k) * inv;
      if (f == 0) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return d;
}

QMat inverse(const QMat& m) {
  if (!m.is_square()) throw std::invalid_argument("inverse: not square");
  const std::size_t n = m.rows();
  QMat a = m;
  QMat inv = QMat::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && a(piv, k) == 0) ++piv;
    if (piv == n) throw std::domain_error("inverse: singular matrix");
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(k, j), a(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    Rat f = Rat(1) / a(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      a(k, j) *= f;
      inv(k, j) *= f;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || a(i, k) == 0) continue;
      Rat g = a(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= g * a(k, j);
        inv(i, j) -= g * inv(k, j);
      }
    }
  }
  return inv;
}

std::vector<Int> charpoly(const IMat& m) {
  if (!m.is_square()) throw std::invalid_argument("charpoly: not square");
  const std::size_t n = m.rows();
  std::vector<Int> c(n + 1);
  c[n] = 1;
  IMat acc = IMat::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    acc = m * acc;
    Int tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += acc(i, i);
    c[n - k] = divexact(-tr, Int(static_cast<long>(k)));
    for (std::size_t i = 0; i < n; ++i) acc(i, i) += c[n - k];
  }
  return c;
}

IMat hnf(const IMat& a, IMat* transform) {
  const std::size_t m = a.rows(), n = a.cols();
  IMat h = a;
  IMat u = IMat::identity(m);
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < m; ++col) {
    // Clear the column below row r with extended gcd row operations.
    for (std::size_t i = r + 1; i < m; ++i) {
      if (h(i, col) == 0) continue;
      if (h(r, col) == 0) {
        for (std::size_t j = 0; j < n; ++j) std::swap(h(r, j), h(i, j));
        for (std::size_t j = 0; j < m; ++j) std::swap(u(r, j), u(i, j));
        continue;
      }
      Int p, q;
      Int g = gcdext(h(r, col), h(i, col), p, q);
      Int s = divexact(h(r, col), g), t = divexact(h(i, col), g);
      for (std::size_t j = 0; j < n; ++j) {
        Int hr = h(r, j), hi = h(i, j);
        h(r, j) = p * hr + q * hi;
        h(i, j) = -t * hr + s * hi;
      }
      for (std::size_t j = 0; j < m; ++j) {
        Int ur = u(r, j), ui = u(i, j);
        u(r, j) = p * ur + q * ui;
        u(i, j) = -t * ur + s * ui;
      }
    }
    if (h(r, col) == 0) continue;
    if (h(r, col) < 0) {
      for (std::size_t j = 0; j < n; ++j) h(r, j) = -h(r, j);
      for (std::size_t j = 0; j < m; ++j) u(r, j) = -u(r, j);
    }
    // Reduce entries above the pivot.
    for (std::size_t i = 0; i < r; ++i) {
      Int q = fdiv_q(h(i, col), h(r, col));
      if (q == 0) continue;
      for (std::size_t j = 0; j < n; ++j) h(i, j) -= q * h(r, j);
      for (std::size_t j = 0; j < m; ++j) u(i, j) -= q * u(r, j);
    }
    ++r;
  }
  if (transform) *transform = u;
  return h;
}

IMat left_kernel(const IMat& a) {
  IMat u;
  IMat h = hnf(a, &u);
  std::size_t r = 0;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    bool zero = true;
    for (std::size_t j = 0; j < h.cols(); ++j)
      if (h(i, j) != 0) {
        zero = false;
        break;
      }
    if (!zero) ++r;
  }
  IMat k(h.rows() - r, a.rows());
  for (std::size_t i = r; i < h.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j) k(i - r, j) = u(i, j);
  return k;
}

std::size_t rank_of(const IMat& a) {
  IMat h = hnf(a);
  std::size_t r = 0;
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j)
      if (h(i, j) != 0) {
        ++r;
        break;
      }
  return r;
}

IMat snf(const IMat& a, IMat* uo, IMat* vo) {
  const std::size_t m = a.rows(), n = a.cols();
  IMat s = a;
  IMat u = IMat::identity(m), v = IMat::identity(n);
  std::size_t t = std::min(m, n);
  for (std::size_t k = 0; k < t; ++k) {
    for (;;) {
      // Pivot: smallest nonzero entry in the remaining block.
      std::size_t pi = k, pj = k;
      bool found = false;
      for (std::size_t i = k; i < m; ++i)
        for (std::size_t j = k; j < n; ++j)
          if (s(i, j) != 0 &&
              (!found || abs(s(i, j)) < abs(s(pi, pj)))) {
            pi = i;
            pj = j;
            found = true;
          }
      if (!found) {
        if (uo) *uo = u;
        if (vo) *vo = v;
        return s;
      }
      if (pi != k)
        for (std::size_t j = 0; j < n; ++j) std::swap(s(k, j), s(pi, j));
      if (pi != k)
        for (std::size_t j = 0; j < m; ++j) std::swap(u(k, j), u(pi, j));
      if (pj != k)
        for (std::size_t i = 0; i < m; ++i) std::swap(s(i, k), s(i, pj));
      if (pj != k)
        for (std::size_t i = 0; i < n; ++i) std::swap(v(i, k), v(i, pj));

      bool clean = true;
      for (std::size_t i = k + 1; i < m; ++i) {
        Int q = fdiv_q(s(i, k), s(k, k));
        if (q != 0) {
          for (std::size_t j = 0; j < n; ++j) s(i, j) -= q * s(k, j);
          for (std::size_t j = 0; j < m; ++j) u(i, j) -= q * u(k, j);
        }
        if (s(i, k) != 0) clean = false;
      }
      for (std::size_t j = k + 1; j < n; ++j) {
        Int q = fdiv_q(s(k, j), s(k, k));
        if (q != 0) {
          for (std::size_t i = 0; i < m; ++i) s(i, j) -= q * s(i, k);
          for (std::size_t i = 0; i < n; ++i) v(i, j) -= q * v(i, k);
        }
        if (s(k, j) != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: fold in any entry the pivot does not divide.
      bool divides_all = true;
      for (std::size_t i = k + 1; i < m && divides_all; ++i)
        for (std::size_t j = k + 1; j < n && divides_all; ++j)
          if (!divides(s(k, k), s(i, j))) {
            for (std::size_t jj = 0; jj < n; ++jj) s(k, jj) += s(i, jj);
            for (std::size_t jj = 0; jj < m; ++jj) u(k, jj) += u(i, jj);
            divides_all = false;
          }
      if (divides_all) break;
    }
    if (s(k, k) < 0) {
      for (std::size_t j = 0; j < n; ++j) s(k, j) = -s(k, j);
      for (std::size_t j = 0; j < m; ++j) u(k, j) = -u(k, j);
    }
  }
  if (uo) *uo = u;
  if (vo) *vo = v;
  return s;
}

IMat complete_to_unimodular(const IVec& c) {
  const std::size_t n = c.size();
  IMat col(n, 1);
  for (std::size_t j = 0; j < n; ++j) col(j, 0) = c[j];
  IMat u;
  IMat h = hnf(col, &u);
  if (h(0, 0) != 1)
    throw std::invalid_argument("complete_to_unimodular: not primitive");
  // u * c^T = e_1, so c is the first row of (u^{-1})^T.
  IMat out = to_int(inverse(to_rat(u)).transposed());
  for (std::size_t j = 0; j < n; ++j)
    if (out(0, j) != c[j])
      throw std::logic_error("complete_to_unimodular: completion failed");
  return out;
}

bool hnf_contains(const IMat& h, const IVec& v) {
  IVec x = v;
  std::size_t row = 0;
  for (std::size_t col = 0; col < h.cols(); ++col) {
    if (row < h.rows() && h(row, col) != 0) {
      Int q = fdiv_q(x[col], h(row, col));
      for (std::size_t j = 0; j < h.cols(); ++j) x[j] -= q * h(row, j);
      if (x[col] != 0) return false;
      ++row;
    } else if (x[col] != 0) {
      return false;
    }
  }
  return true;
}

namespace {

// Clear denominators, HNF, rescale: canonical basis of the lattice spanned
// over Z by the rows of a rational matrix.
QMat q_lattice_basis(const QMat& gens) {
  Int den = 1;
  for (std::size_t i = 0; i < gens.rows(); ++i)
    for (std::size_t j = 0; j < gens.cols(); ++j)
      den = lcm(den, Int(gens(i, j).get_den()));
  IMat scaled(gens.rows(), gens.cols());
  for (std::size_t i = 0; i < gens.rows(); ++i)
    for (std::size_t j = 0; j < gens.cols(); ++j) {
      Rat x = gens(i, j) * Rat(den);
      scaled(i, j) = x.get_num();
    }
  IMat h = hnf(scaled);
  std::size_t r = 0;
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j)
      if (h(i, j) != 0) {
        ++r;
        break;
      }
  QMat b(r, gens.cols());
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < gens.cols(); ++j)
      b(i, j) = Rat(h(i, j)) / Rat(den);
  return b;
}

}  // namespace

QMat lattice_intersection(const QMat& a, const QMat& b) {
  // Dualize: A cap B = (A^* + B^*)^* in the coordinate sense, using
  // row-space duals with respect to the standard pairing.
  const std::size_t n = a.cols();
  if (a.rows() != n || b.rows() != n)
    throw std::invalid_argument("lattice_intersection: need full rank bases");
  QMat ad = inverse(a.transposed());
  QMat bd = inverse(b.transposed());
  QMat sum = q_lattice_basis(ad.stacked(bd));
  if (sum.rows() != n) throw std::logic_error("intersection: rank drop");
  return inverse(sum.transposed());
}

Int lattice_index(const QMat& sup, const QMat& sub) {
  Rat q = det(sub) / det(sup);
  Rat aq = q < 0 ? -q : q;
  if (aq.get_den() != 1)
    throw std::domain_error("lattice_index: not a finite-index sublattice");
  return aq.get_num();
}

}  // namespace hyperlat
