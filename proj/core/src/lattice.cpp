#include "hyperlat/lattice.hpp"

#include <algorithm>
#include <functional>
#include <random>

#include "hyperlat/binary_forms.hpp"
#include "hyperlat/short_vectors.hpp"

namespace hyperlat {

IntegerLattice::IntegerLattice(IMat gram, std::string name)
    : gram_(std::move(gram)), name_(std::move(name)) {
  if (!gram_.is_symmetric())
    throw std::invalid_argument("IntegerLattice: gram not symmetric");
}

bool IntegerLattice::is_even() const {
  for (std::size_t i = 0; i < rank(); ++i)
    if (fdiv_r(gram_(i, i), 2) != 0) return false;
  return true;
}

Int IntegerLattice::det() const { return hyperlat::det(gram_); }

Int IntegerLattice::disc() const {
  Int d = det();
  if (d == 0) throw std::domain_error("disc: degenerate lattice");
  return abs(d);
}

IntegerLattice IntegerLattice::rescaled(const Int& m) const {
  return IntegerLattice(gram_ * m);
}

IntegerLattice IntegerLattice::direct_sum(const IntegerLattice& other) const {
  std::size_t n1 = rank(), n2 = other.rank();
  IMat g(n1 + n2, n1 + n2);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n1; ++j) g(i, j) = gram_(i, j);
  for (std::size_t i = 0; i < n2; ++i)
    for (std::size_t j = 0; j < n2; ++j) g(n1 + i, n1 + j) = other.gram_(i, j);
  return IntegerLattice(g);
}

IntegerLattice lattice_U() { return lattice_U(1, 0); }
IntegerLattice lattice_U(const Int& n) { return lattice_U(n, 0); }
IntegerLattice lattice_U(const Int& n, const Int& k) {
  IMat g(2, 2);
  g(0, 0) = 0;
  g(0, 1) = n;
  g(1, 0) = n;
  g(1, 1) = 2 * k;
  return IntegerLattice(g, "U(" + n.get_str() + "," + k.get_str() + ")");
}
IntegerLattice lattice_A1() {
  IMat g(1, 1);
  g(0, 0) = -2;
  return IntegerLattice(g, "A1");
}
IntegerLattice lattice_A2() {
  IMat g(2, 2);
  g(0, 0) = -2;
  g(0, 1) = 1;
  g(1, 0) = 1;
  g(1, 1) = -2;
  return IntegerLattice(g, "A2");
}
IntegerLattice lattice_rank1(const Int& m) {
  IMat g(1, 1);
  g(0, 0) = m;
  return IntegerLattice(g, "[" + m.get_str() + "]");
}

Signature signature(const IntegerLattice& L) {
  // Descartes on the characteristic polynomial: all roots are real, so the
  // sign-variation count is exact.
  std::vector<Int> c = charpoly(L.gram());
  Signature s;
  std::size_t z = 0;
  while (z < c.size() && c[z] == 0) ++z;
  s.n_zero = static_cast<int>(z);
  auto variations = [](const std::vector<Int>& v) {
    int var = 0, last = 0;
    for (const auto& x : v) {
      if (x == 0) continue;
      int sg = x > 0 ? 1 : -1;
      if (last != 0 && sg != last) ++var;
      last = sg;
    }
    return var;
  };
  std::vector<Int> q(c.begin() + z, c.end());
  s.n_plus = variations(q);
  std::vector<Int> qneg = q;
  for (std::size_t i = 0; i < qneg.size(); ++i)
    if (i % 2 == 1) qneg[i] = -qneg[i];
  s.n_minus = variations(qneg);
  return s;
}

Int disc(const IntegerLattice& L) { return L.disc(); }

DivisibilityData divisibility(const IntegerLattice& L, const IVec& v) {
  if (content(v) != 1) throw std::invalid_argument("divisibility: v not primitive");
  Int norm = dot(v, L.gram(), v);
  if (norm == 0) throw std::invalid_argument("divisibility: v isotropic");
  DivisibilityData d;
  d.k = content(mat_vec(L.gram(), v));
  d.g = divexact(abs(norm), d.k);
  d.twice_disc_bound = 2 * d.g <= d.k;
  return d;
}

SublatticeWithBasis orthogonal_complement(const IntegerLattice& L,
                                          const IMat& span_rows) {
  IMat k = left_kernel(L.gram() * span_rows.transposed());
  IntegerLattice comp(k * L.gram() * k.transposed());
  return {comp, k};
}

IntegerLattice orthogonal_quotient(const IntegerLattice& L, const IVec& v) {
  if (content(v) != 1)
    throw std::invalid_argument("orthogonal_quotient: v not primitive");
  if (dot(v, L.gram(), v) != 0)
    throw std::invalid_argument("orthogonal_quotient: v not isotropic");
  if (L.det() == 0)
    throw std::invalid_argument("orthogonal_quotient: degenerate lattice");
  const std::size_t n = L.rank();
  // v^perp as a saturated sublattice; v lies in it since v^2 = 0.
  IMat gv(n, 1);
  IVec gvv = mat_vec(L.gram(), v);
  for (std::size_t i = 0; i < n; ++i) gv(i, 0) = gvv[i];
  IMat k = left_kernel(gv);  // rows: basis of v^perp (saturated)
  const std::size_t m = k.rows();
  if (m != n - 1) throw std::logic_error("orthogonal_quotient: kernel rank");
  // Solve c * k = v on a set of independent columns; c is integral because
  // the kernel is saturated and v is primitive.
  std::vector<std::size_t> cols;
  {
    IMat h = hnf(k);
    std::size_t rr = 0;
    for (std::size_t j = 0; j < n && rr < m; ++j)
      if (h(rr, j) != 0) {
        cols.push_back(j);
        ++rr;
      }
  }
  QMat sq(m, m);
  QVec rhs(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t jj = 0; jj < m; ++jj) sq(jj, i) = Rat(k(i, cols[jj]));
  for (std::size_t jj = 0; jj < m; ++jj) rhs[jj] = Rat(v[cols[jj]]);
  QVec coeff = mat_vec(inverse(sq), rhs);
  IVec c(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (coeff[i].get_den() != 1)
      throw std::logic_error("orthogonal_quotient: non-integral coefficients");
    c[i] = coeff[i].get_num();
  }
  for (std::size_t j = 0; j < n; ++j) {
    Int s = 0;
    for (std::size_t i = 0; i < m; ++i) s += c[i] * k(i, j);
    if (s != v[j]) throw std::logic_error("orthogonal_quotient: v not in v^perp");
  }
  if (content(c) != 1)
    throw std::logic_error("orthogonal_quotient: v imprimitive in v^perp");
  IMat cmpl = complete_to_unimodular(c);
  IMat newbasis = cmpl * k;  // first row is v
  IMat rest(m - 1, n);
  for (std::size_t i = 1; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) rest(i - 1, j) = newbasis(i, j);
  return IntegerLattice(rest * L.gram() * rest.transposed());
}

IntegerLattice root_sublattice(const IntegerLattice& M) {
  if (!signature(M).negative_definite())
    throw std::invalid_argument("root_sublattice: not negative definite");
  auto roots = vectors_of_norm(-M.gram(), 2);
  if (roots.empty()) return IntegerLattice(IMat(0, 0));
  IMat stack(roots.size(), M.rank());
  for (std::size_t i = 0; i < roots.size(); ++i) stack.set_row(i, roots[i]);
  IMat h = hnf(stack);
  std::size_t r = 0;
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j)
      if (h(i, j) != 0) {
        ++r;
        break;
      }
  IMat basis = h.submatrix(0, 0, r, M.rank());
  return IntegerLattice(basis * M.gram() * basis.transposed());
}

bool is_isotropic(const IntegerLattice& L) {
  Signature s = signature(L);
  if (!s.nondegenerate())
    throw std::invalid_argument("is_isotropic: degenerate lattice");
  if (!s.indefinite()) return false;
  const std::size_t n = L.rank();
  if (n >= 5) return true;  // Meyer
  // Rational diagonalization.
  QMat g = to_rat(L.gram());
  std::vector<Rat> d;
  {
    QMat a = g;
    std::size_t m = n;
    for (std::size_t k = 0; k < m; ++k) {
      if (a(k, k) == 0) {
        // find l > k with a(l,l) != 0 or mix rows
        std::size_t l = k + 1;
        while (l < m && a(l, l) == 0) ++l;
        if (l < m) {
          for (std::size_t j = 0; j < m; ++j) std::swap(a(k, j), a(l, j));
          for (std::size_t j = 0; j < m; ++j) std::swap(a(j, k), a(j, l));
        } else {
          // all remaining diagonals zero; some off-diagonal nonzero
          std::size_t p = m, q = m;
          for (std::size_t i = k; i < m && p == m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
              if (a(i, j) != 0) {
                p = i;
                q = j;
                break;
              }
          if (p == m) break;  // zero block (degenerate; unreachable here)
          // row/col p += row/col q makes a(p,p) = 2 a(p,q) != 0
          for (std::size_t j = 0; j < m; ++j) a(p, j) += a(q, j);
          for (std::size_t j = 0; j < m; ++j) a(j, p) += a(j, q);
          if (p != k) {
            for (std::size_t j = 0; j < m; ++j) std::swap(a(k, j), a(p, j));
            for (std::size_t j = 0; j < m; ++j) std::swap(a(j, k), a(j, p));
          }
        }
      }
      if (a(k, k) == 0) break;
      for (std::size_t i = k + 1; i < m; ++i) {
        if (a(i, k) == 0) continue;
        Rat f = a(i, k) / a(k, k);
        for (std::size_t j = 0; j < m; ++j) a(i, j) -= f * a(k, j);
        for (std::size_t j = 0; j < m; ++j) a(j, i) -= f * a(j, k);
      }
    }
    for (std::size_t i = 0; i < m; ++i) d.push_back(a(i, i));
  }
  // squarefree integer representatives of the square classes
  std::vector<Int> ds;
  for (auto& x : d) {
    Int t = x.get_num() * x.get_den();
    Int sq = 1;
    for (const auto& [p, e] : factor(t)) {
      if (e % 2 != 0) sq *= p;
    }
    ds.push_back(t < 0 ? -sq : sq);
  }
  Int prod = 1;
  for (auto& x : ds) prod *= x;
  std::vector<Int> ps = prime_divisors(2 * prod);
  if (n == 2) {
    // <a,b> isotropic over Q iff -ab is a square
    return is_perfect_square(-ds[0] * ds[1]);
  }
  auto hasse = [&](const Int& p) {
    int e = 1;
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (std::size_t j = i + 1; j < ds.size(); ++j)
        e *= hilbert_symbol(Rat(ds[i]), Rat(ds[j]), p);
    return e;
  };
  if (n == 3) {
    // isotropic over Q_p iff (-1,-d)_p == hasse_p
    for (const auto& p : ps) {
      if (hilbert_symbol(Rat(-1), Rat(-prod), p) != hasse(p)) return false;
    }
    return true;
  }
  // n == 4: anisotropic over Q_p iff d is a square in Q_p and
  // hasse_p == -(-1,-1)_p.
  for (const auto& p : ps) {
    if (is_padic_square(Rat(prod), p) &&
        hasse(p) == -hilbert_symbol(Rat(-1), Rat(-1), p))
      return false;
  }
  return true;
}

namespace {

// Greedy symmetric reduction: try to shrink diagonal entries by elementary
// row+column operations. Returns transform rows (new basis in old coords).
IMat greedy_reduce(const IMat& gram, IMat& g) {
  const std::size_t n = gram.rows();
  IMat u = IMat::identity(n);
  g = gram;
  auto size_of = [&]() {
    Int s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s += abs(g(i, j));
    return s;
  };
  Int best = size_of();
  bool again = true;
  int rounds = 0;
  while (again && rounds++ < 256) {
    again = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        std::vector<Int> steps{1, -1};
        // Gauss-style rounded steps against the diagonal and the off-diagonal
        if (g(j, j) != 0) {
          Int t0 = -fdiv_q(2 * g(i, j) + g(j, j), 2 * g(j, j));
          if (t0 != 0) steps.push_back(t0);
        }
        if (g(i, j) != 0 && g(j, j) == 0 && g(i, i) != 0) {
          Int t1 = -fdiv_q(g(i, i) + g(i, j), 2 * g(i, j));
          if (t1 != 0) steps.push_back(t1);
        }
        for (const Int& t : steps) {
          IMat u2 = u;
          for (std::size_t c = 0; c < n; ++c) u2(i, c) += t * u2(j, c);
          IMat g2 = u2 * gram * u2.transposed();
          Int s2 = 0;
          for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) s2 += abs(g2(a, b));
          if (s2 < best) {
            best = s2;
            u = u2;
            g = g2;
            again = true;
          }
        }
      }
  }
  return u;
}

}  // namespace

IMat indefinite_reduce(const IMat& gram, IMat* transform) {
  IMat g;
  IMat u = greedy_reduce(gram, g);
  if (transform) *transform = u;
  return g;
}

std::optional<IVec> isotropic_vector(const IntegerLattice& L,
                                     std::uint64_t seed) {
  const std::size_t n = L.rank();
  if (L.det() == 0) throw std::invalid_argument("isotropic_vector: degenerate");
  if (n == 1) return std::nullopt;
  if (n == 2) {
    BinQF f = form_of(L);
    return binary_isotropic_vector(f);
  }
  if (!is_isotropic(L)) return std::nullopt;
  // A zero diagonal entry is an immediate witness.
  for (std::size_t i = 0; i < n; ++i)
    if (L.gram()(i, i) == 0) {
      IVec v(n, Int(0));
      v[i] = 1;
      return v;
    }
  IMat g;
  IMat u = greedy_reduce(L.gram(), g);
  for (std::size_t i = 0; i < n; ++i)
    if (g(i, i) == 0) {
      IVec v = u.row(i);
      Int c = content(v);
      for (auto& e : v) e = divexact(e, c);
      return v;
    }
  // Growing box search in the reduced basis, solving the quadratic in the
  // last coordinate. Deterministic; the seed randomizes the basis only when
  // the search needs to escalate.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  IMat basis = u;
  for (long radius = 2; radius <= (1L << 16); radius *= 2) {
    IVec x(n, Int(0));
    std::function<std::optional<IVec>(std::size_t)> walk =
        [&](std::size_t idx) -> std::optional<IVec> {
      if (idx + 1 == n) {
        // quadratic a t^2 + b t + c = 0 in the last coordinate
        Int a = g(n - 1, n - 1);
        Int b = 0, c = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
          b += 2 * g(n - 1, i) * x[i];
          for (std::size_t j = 0; j + 1 < n; ++j) c += x[i] * g(i, j) * x[j];
        }
        auto finish = [&](const Int& t) -> std::optional<IVec> {
          IVec y = x;
          y[n - 1] = t;
          bool zero = true;
          for (const auto& e : y)
            if (e != 0) zero = false;
          if (zero) return std::nullopt;
          IVec v(n, Int(0));
          for (std::size_t cc = 0; cc < n; ++cc)
            for (std::size_t i = 0; i < n; ++i) v[cc] += y[i] * basis(i, cc);
          Int ct = content(v);
          for (auto& e : v) e = divexact(e, ct);
          if (dot(v, L.gram(), v) != 0)
            throw std::logic_error("isotropic_vector: bad witness");
          return v;
        };
        if (a == 0) {
          if (b == 0) {
            if (c == 0) {
              // any t works; pick 1 unless x is all zero
              return finish(1);
            }
            return std::nullopt;
          }
          if (divides(b, -c)) return finish(divexact(-c, b));
          return std::nullopt;
        }
        Int disc = b * b - 4 * a * c;
        if (disc < 0 || !is_perfect_square(disc)) return std::nullopt;
        Int s = isqrt(disc);
        for (const Int& num : {Int(-b + s), Int(-b - s)}) {
          if (divides(2 * a, num)) {
            auto r = finish(divexact(num, 2 * a));
            if (r) return r;
          }
        }
        return std::nullopt;
      }
      for (long t = 0; t <= radius; t = t > 0 ? -t : -t + 1) {
        x[idx] = t;
        auto r = walk(idx + 1);
        if (r) return r;
      }
      x[idx] = 0;
      return std::nullopt;
    };
    auto r = walk(0);
    if (r) return r;
    // randomize basis a little before growing the box
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    IMat u2 = IMat::identity(n);
    std::size_t i = pick(rng), j = pick(rng);
    if (i != j) {
      for (std::size_t c = 0; c < n; ++c) u2(i, c) += u2(j, c);
      basis = u2 * basis;
      g = basis * L.gram() * basis.transposed();
    }
  }
  throw std::logic_error("isotropic_vector: search budget exhausted");
}

bool binary_represents(const IntegerLattice& M, const Int& t) {
  if (M.rank() != 2) throw std::invalid_argument("binary_represents: rank != 2");
  return represents(form_of(M), t);
}

}  // namespace hyperlat
