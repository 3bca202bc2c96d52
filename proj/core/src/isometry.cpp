#include "hyperlat/isometry.hpp"

#include <algorithm>
#include <functional>

#include "hyperlat/binary_forms.hpp"
#include "hyperlat/padic.hpp"
#include "hyperlat/short_vectors.hpp"
#include "hyperlat/spinor.hpp"

namespace hyperlat {

namespace {

// Completion of a saturated row lattice to a unimodular basis; returns the
// complementary rows.
IMat saturated_completion(const IMat& rows, std::size_t n) {
  if (rows.rows() == 0) return IMat::identity(n);
  IMat u, v;
  IMat s = snf(rows, &u, &v);
  for (std::size_t i = 0; i < rows.rows(); ++i)
    if (s(i, i) != 1)
      throw std::invalid_argument("saturated_completion: not saturated");
  IMat vinv = to_int(inverse(to_rat(v)));
  IMat out(n - rows.rows(), n);
  for (std::size_t i = rows.rows(); i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i - rows.rows(), j) = vinv(i, j);
  return out;
}

IsometryVerdict verdict_bool(bool iso, Evidence ev) {
  IsometryVerdict v;
  v.isometric = iso;
  v.evidence = ev;
  return v;
}

// exhaustive enumeration with pruning over short-vector candidate lists
IsometryVerdict definite_backtrack(const IMat& g1, const IMat& g2) {
  const std::size_t n = g1.rows();
  // candidates for image of e_i: vectors of g2-norm g1(i,i)
  std::vector<std::vector<IVec>> cands(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto vs = vectors_of_norm(g2, g1(i, i));
    // both signs matter for cross inner products
    for (const auto& v : vs) {
      cands[i].push_back(v);
      IVec neg(v.size());
      for (std::size_t c = 0; c < v.size(); ++c) neg[c] = -v[c];
      cands[i].push_back(neg);
    }
    if (cands[i].empty()) return verdict_bool(false, Evidence::Trivial);
  }
  IMat img(n, n);
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == n) return abs(det(img)) == 1;
    for (const auto& v : cands[i]) {
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        IVec prev = img.row(j);
        if (dot(v, g2, prev) != g1(i, j)) ok = false;
      }
      if (!ok) continue;
      img.set_row(i, v);
      if (rec(i + 1)) return true;
    }
    return false;
  };
  if (!rec(0)) return verdict_bool(false, Evidence::Trivial);
  IsometryVerdict out = verdict_bool(true, Evidence::ExplicitMap);
  out.map = to_rat(img);
  return out;
}

}  // namespace

IsometryVerdict definite_isometric(const IntegerLattice& L1,
                                   const IntegerLattice& L2) {
  Signature s1 = signature(L1), s2 = signature(L2);
  if (!s1.definite() || !s2.definite())
    throw std::invalid_argument("definite_isometric: not definite");
  if (L1.rank() > 8)
    throw std::invalid_argument("definite_isometric: rank beyond bound");
  if (s1 != s2 || L1.det() != L2.det())
    return verdict_bool(false, Evidence::Trivial);
  bool neg = s1.negative_definite();
  IMat g1 = neg ? -L1.gram() : L1.gram();
  IMat g2 = neg ? -L2.gram() : L2.gram();
  IsometryVerdict v = definite_backtrack(g1, g2);
  if (v.isometric && v.map) {
    // map found for the positive forms equals the one for the originals
    QMat check = *v.map * to_rat(L2.gram()) * v.map->transposed();
    if (check != to_rat(L1.gram()))
      throw std::logic_error("definite_isometric: bad witness");
  }
  return v;
}

namespace {

struct ClearedGram {
  IMat gram;     // den * gc, entry-reduced
  IMat red_u;    // reduction transform: gram = red_u (den gc) red_u^T
  Int den;
};

ClearedGram clear_and_reduce(const QMat& gc) {
  const std::size_t m = gc.rows();
  ClearedGram out;
  out.den = 1;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      out.den = lcm(out.den, Int(gc(i, j).get_den()));
  IMat gi(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Rat e = gc(i, j) * Rat(out.den);
      gi(i, j) = e.get_num();
    }
  out.gram = indefinite_reduce(gi, &out.red_u);
  return out;
}

// small anisotropic vector in the coordinates of gc; when the form has just
// one positive (resp. negative) eigenvalue, prefer that sign so the
// orthogonal complement comes out definite.
QVec small_anisotropic(const QMat& gc) {
  const std::size_t m = gc.rows();
  ClearedGram cg = clear_and_reduce(gc);
  Signature s = signature(IntegerLattice(cg.gram));
  int want = 0;
  if (m >= 2 && s.n_plus == 1) want = 1;
  if (m >= 2 && s.n_minus == 1) want = -1;
  std::optional<IVec> best;
  Int bestn = 0;
  auto consider = [&](const IVec& v) {
    Int nn = dot(v, cg.gram, v);
    if (nn == 0) return;
    if (want != 0 && ((want > 0) != (nn > 0))) return;
    if (!best || abs(nn) < abs(bestn)) {
      best = v;
      bestn = nn;
    }
  };
  auto scan = [&](long radius) {
    IVec v(m, Int(0));
    std::function<void(std::size_t)> walk = [&](std::size_t idx) {
      if (idx == m) {
        consider(v);
        return;
      }
      for (long t = 0; t <= radius; t = t > 0 ? -t : -t + 1) {
        v[idx] = t;
        walk(idx + 1);
      }
      v[idx] = 0;
    };
    walk(0);
  };
  for (long radius = 1; radius <= 64 && !best; radius *= 2) scan(radius);
  if (!best) throw std::logic_error("small_anisotropic: none found");
  QVec out(m, Rat(0));
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t i = 0; i < m; ++i)
      out[c] += Rat((*best)[i] * cg.red_u(i, c));
  return out;
}

// vector y with y gc y^T == target, by enumeration over scalings
std::optional<QVec> represent_value(const QMat& gc, const Rat& target) {
  const std::size_t m = gc.rows();
  ClearedGram cg = clear_and_reduce(gc);
  Signature sig = signature(IntegerLattice(cg.gram));
  auto back_map = [&](const IVec& z, long scale) {
    QVec zz(m, Rat(0));
    for (std::size_t c2 = 0; c2 < m; ++c2)
      for (std::size_t i2 = 0; i2 < m; ++i2)
        zz[c2] += Rat(z[i2] * cg.red_u(i2, c2)) / Rat(scale);
    return zz;
  };
  for (long scale = 1; scale <= 60; ++scale) {
    Rat st = target * Rat(cg.den) * Rat(scale) * Rat(scale);
    if (st.get_den() != 1) continue;
    Int starget = st.get_num();
    if (starget == 0) continue;
    if (m == 1) {
      // z^2 * g == starget, analytic
      if (!divides(cg.gram(0, 0), starget)) continue;
      Int q = divexact(starget, cg.gram(0, 0));
      if (q < 0 || !is_perfect_square(q)) continue;
      IVec z{isqrt(q)};
      return back_map(z, scale);
    }
    if (sig.definite()) {
      // complete enumeration at exact norm
      bool neg = sig.negative_definite();
      if (neg != (starget < 0)) continue;
      IMat pg = neg ? -cg.gram : cg.gram;
      auto vs = vectors_of_norm(pg, neg ? -starget : starget);
      if (!vs.empty()) return back_map(vs.front(), scale);
      continue;
    }
    for (long radius = 1; radius <= 32; radius *= 2) {
      IVec z(m, Int(0));
      std::optional<QVec> found;
      std::function<bool(std::size_t)> walk = [&](std::size_t idx) -> bool {
        if (idx == m) {
          if (dot(z, cg.gram, z) == starget) {
            found = back_map(z, scale);
            return true;
          }
          return false;
        }
        for (long t = 0; t <= radius; t = t > 0 ? -t : -t + 1) {
          z[idx] = t;
          if (walk(idx + 1)) return true;
        }
        z[idx] = 0;
        return false;
      };
      if (walk(0)) return found;
    }
  }
  return std::nullopt;
}

// orthogonal complement of y inside the row space of basis; y_coords are
// the coordinates of y against the basis rows (a nonzero one marks the row
// that is dropped so independence survives the projection)
QMat project_complement(const QMat& basis, const QMat& g_amb, const QVec& y,
                        const QVec& y_coords) {
  const std::size_t m = basis.rows();
  const std::size_t n = basis.cols();
  Rat ynorm = dot(y, g_amb, y);
  std::size_t drop = m;
  for (std::size_t i = 0; i < m; ++i)
    if (y_coords[i] != 0) drop = i;
  if (drop == m) throw std::logic_error("project_complement: zero vector");
  QMat nb(m - 1, n);
  std::size_t r = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == drop) continue;
    Rat coef = dot(basis.row(i), g_amb, y) / ynorm;
    QVec row(n);
    for (std::size_t c = 0; c < n; ++c) row[c] = basis(i, c) - coef * y[c];
    nb.set_row(r++, row);
  }
  return nb;
}

}  // namespace

QMat rational_isometry(const IntegerLattice& L1, const IntegerLattice& L2) {
  const std::size_t n = L1.rank();
  if (L2.rank() != n)
    throw std::invalid_argument("rational_isometry: rank mismatch");
  QMat g1 = to_rat(L1.gram());
  QMat g2 = to_rat(L2.gram());
  QMat basisA = QMat::identity(n), basisB = QMat::identity(n);
  QMat X(n, n), Y(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = n - k;
    QMat ga = basisA * g1 * basisA.transposed();
    QMat gb = basisB * g2 * basisB.transposed();
    // a small anisotropic norm attained on the A side, represented on B
    QVec xa = small_anisotropic(ga);
    Rat target = dot(xa, ga, xa);
    auto yb = represent_value(gb, target);
    if (!yb) {
      // try the other orientation: take the B side's small norm instead
      QVec xb = small_anisotropic(gb);
      Rat t2 = dot(xb, gb, xb);
      auto ya = represent_value(ga, t2);
      if (!ya)
        throw std::logic_error("rational_isometry: representation search failed");
      xa = *ya;
      target = t2;
      yb = xb;
    }
    QVec x_orig(n, Rat(0)), y_orig(n, Rat(0));
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t i = 0; i < m; ++i) {
        x_orig[c] += xa[i] * basisA(i, c);
        y_orig[c] += (*yb)[i] * basisB(i, c);
      }
    X.set_row(k, x_orig);
    Y.set_row(k, y_orig);
    if (k + 1 == n) break;
    basisA = project_complement(basisA, g1, x_orig, xa);
    basisB = project_complement(basisB, g2, y_orig, *yb);
  }
  QMat f = inverse(X) * Y;
  if (f * g2 * f.transposed() != g1)
    throw std::logic_error("rational_isometry: verification failed");
  return f;
}

IsometryVerdict indefinite_isometric(const IntegerLattice& L1in,
                                     const IntegerLattice& L2in) {
  IntegerLattice L1 = L1in, L2 = L2in;
  Signature s1 = signature(L1);
  if (!s1.indefinite() || s1.rank() < 3 || s1.n_zero != 0)
    throw std::invalid_argument("indefinite_isometric: bad input");
  if (signature(L2) != s1 || L1.det() != L2.det())
    return verdict_bool(false, Evidence::Trivial);
  // scaling by 2 changes nothing relevant; keeps the genus machinery even
  if (!L1.is_even() || !L2.is_even()) {
    L1 = L1.rescaled(2);
    L2 = L2.rescaled(2);
  }
  if (!same_genus(L1, L2)) return verdict_bool(false, Evidence::DifferentGenus);
  if (is_single_spinor_genus(L1))
    return verdict_bool(true, Evidence::SingleSpinorGenus);
  const std::size_t n = L1.rank();
  QMat g2 = to_rat(L2.gram());
  QMat b1 = rational_isometry(L1, L2);  // rows: L1 basis inside V = L2 x Q
  if (det(b1) == -1) {
    // compose with an improper isometry of L1 so the embedding is proper
    for (std::size_t i = 0; i < n; ++i)
      if (L1.gram()(i, i) != 0) {
        QVec e(n, Rat(0));
        e[i] = 1;
        b1 = reflection(to_rat(L1.gram()), e) * b1;
        break;
      }
    if (det(b1) != 1) {
      QVec e(n, Rat(0));
      e[0] = 1;
      e[1] = 1;
      if (dot(e, to_rat(L1.gram()), e) != 0)
        b1 = reflection(to_rat(L1.gram()), e) * b1;
    }
    if (det(b1) != 1)
      throw std::logic_error("indefinite_isometric: orientation fix failed");
  }
  QMat ident = QMat::identity(n);
  Int r;
  {
    QMat inter = lattice_intersection(b1, ident);
    r = lattice_index(b1, inter);
  }
  std::vector<Int> support = prime_divisors(2 * L1.disc());
  Int d = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d = lcm(d, Int(b1(i, j).get_den()));
  std::vector<ApproximateIsometry> targets;
  for (const auto& p : support) {
    long vr = r == 1 ? 0 : (divides(p, r) ? valuation(r, p) : 0);
    long kp = vr + 2 * static_cast<long>(n) + 10;
    long vd = d == 1 ? 0 : (divides(p, d) ? valuation(d, p) : 0);
    QMat sp = local_gram_isometry(L1.gram(), L2.gram(), p, kp + vd + 4);
    // orientation bookkeeping: det(S_p) must be close to +1
    {
      Rat dd = det(sp) - 1;
      long nu2 = p == 2 ? 1 : 0;
      long v = dd == 0 ? 1000000 : valuation(dd, p);
      if (v < 1 + 2 * nu2) {
        IVec ng = norm_generator(L1, p);
        QVec ngq(n);
        for (std::size_t c = 0; c < n; ++c) ngq[c] = Rat(ng[c]);
        sp = reflection(to_rat(L1.gram()), ngq) * sp;
        Rat dd2 = det(sp) - 1;
        long v2 = dd2 == 0 ? 1000000 : valuation(dd2, p);
        if (v2 < 1 + 2 * nu2)
          throw std::logic_error("indefinite_isometric: determinant fix failed");
      }
    }
    ApproximateIsometry t;
    t.p = p;
    t.matrix = inverse(b1) * sp;
    t.precision = vr + 3;
    Int dn = 1;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        dn = lcm(dn, Int(t.matrix(i, j).get_den()));
    t.denominator = dn;
    targets.push_back(std::move(t));
  }
  QMat f = weak_approximation(g2, targets);
  QMat image = b1 * f;
  Int r2;
  {
    QMat inter = lattice_intersection(image, ident);
    r2 = lattice_index(ident, inter);
  }
  for (const auto& p : support)
    if (divides(p, r2))
      throw std::logic_error(
          "indefinite_isometric: residual index inside the support");
  bool iso = is_improper_spinor_generator(Rat(r2), L1);
  IsometryVerdict v = verdict_bool(
      iso, iso ? Evidence::SpinorGenerator : Evidence::SpinorObstruction);
  v.index = Rat(r2);
  return v;
}

IsometryVerdict is_isometric(const IntegerLattice& L1, const IntegerLattice& L2) {
  if (L1.rank() != L2.rank()) return verdict_bool(false, Evidence::Trivial);
  if (L1.det() != L2.det()) return verdict_bool(false, Evidence::Trivial);
  const std::size_t n = L1.rank();
  if (n == 0) return verdict_bool(true, Evidence::Trivial);
  Signature s1 = signature(L1), s2 = signature(L2);
  if (s1 != s2) return verdict_bool(false, Evidence::Trivial);
  if (s1.n_zero > 0) {
    // degenerate: compare kernels and nondegenerate quotients
    IMat k1 = left_kernel(L1.gram());
    IMat k2 = left_kernel(L2.gram());
    if (k1.rows() != k2.rows()) return verdict_bool(false, Evidence::Trivial);
    IMat c1 = saturated_completion(k1, n);
    IMat c2 = saturated_completion(k2, n);
    IntegerLattice q1(c1 * L1.gram() * c1.transposed());
    IntegerLattice q2(c2 * L2.gram() * c2.transposed());
    return is_isometric(q1, q2);
  }
  if (n == 1)
    return verdict_bool(L1.gram()(0, 0) == L2.gram()(0, 0), Evidence::Trivial);
  if (n == 2) {
    bool eq = equivalent(form_of(L1), form_of(L2));
    return verdict_bool(eq, Evidence::Trivial);
  }
  if (s1.definite()) return definite_isometric(L1, L2);
  return indefinite_isometric(L1, L2);
}

ClassRegistry::InsertResult ClassRegistry::insert(const IntegerLattice& L) {
  return insert(L, genus_hash(L));
}

ClassRegistry::InsertResult ClassRegistry::insert(const IntegerLattice& L,
                                                  const std::string& h) {
  auto& bucket = buckets_[h];
  for (auto idx : bucket) {
    const Entry& e = entries_[idx];
    Signature s = signature(L);
    if (s.indefinite() && s.rank() >= 3 && L.is_even() &&
        e.lattice.is_even()) {
      if (!same_genus(L, e.lattice)) continue;
      if (!e.spinor_log2)
        e.spinor_log2 = spinor_data(e.lattice).spinor_genera_log2;
      if (*e.spinor_log2 == 0) return {false, idx};
    }
    if (is_isometric(L, e.lattice).isometric) return {false, idx};
  }
  Entry e;
  e.lattice = L;
  e.hash = h;
  entries_.push_back(std::move(e));
  bucket.push_back(entries_.size() - 1);
  return {true, entries_.size() - 1};
}

std::optional<std::size_t> ClassRegistry::find(const IntegerLattice& L) const {
  std::string h = genus_hash(L);
  auto it = buckets_.find(h);
  if (it == buckets_.end()) return std::nullopt;
  for (auto idx : it->second) {
    const Entry& e = entries_[idx];
    Signature s = signature(L);
    if (s.indefinite() && s.rank() >= 3 && L.is_even() && e.lattice.is_even()) {
      if (!same_genus(L, e.lattice)) continue;
      if (!e.spinor_log2)
        e.spinor_log2 = spinor_data(e.lattice).spinor_genera_log2;
      if (*e.spinor_log2 == 0) return idx;
    }
    if (is_isometric(L, e.lattice).isometric) return idx;
  }
  return std::nullopt;
}

}  // namespace hyperlat
