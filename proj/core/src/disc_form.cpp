#include "hyperlat/disc_form.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hyperlat {

namespace {

Rat mod2(Rat x) {
  Int num = x.get_num(), den = x.get_den();
  Int m = 2 * den;
  Rat r(fdiv_r(num, m), den);
  r.canonicalize();
  return r;
}

Rat mod1(Rat x) {
  Int num = x.get_num(), den = x.get_den();
  Rat r(fdiv_r(num, den), den);
  r.canonicalize();
  return r;
}

}  // namespace

DiscriminantForm discriminant_form(const IntegerLattice& L) {
  if (!L.is_even()) throw std::invalid_argument("discriminant_form: odd lattice");
  if (L.det() == 0)
    throw std::invalid_argument("discriminant_form: degenerate lattice");
  const std::size_t n = L.rank();
  IMat u, v;
  IMat s = snf(L.gram(), &u, &v);
  std::vector<Int> orders;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i)
    if (s(i, i) > 1) {
      keep.push_back(i);
      orders.push_back(s(i, i));
    }
  QMat gens(keep.size(), n);
  for (std::size_t r = 0; r < keep.size(); ++r)
    for (std::size_t c = 0; c < n; ++c)
      gens(r, c) = make_rat(v(c, keep[r]), s(keep[r], keep[r]));
  QMat gq = to_rat(L.gram());
  QMat q(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    QVec gi = gens.row(i);
    for (std::size_t j = 0; j < keep.size(); ++j) {
      QVec gj = gens.row(j);
      Rat val = dot(gi, gq, gj);
      q(i, j) = i == j ? mod2(val) : mod1(val);
    }
  }
  return DiscriminantForm{FiniteQuadraticForm(orders, q), gens};
}

OverlatticeResult overlattice_from_generators(const IntegerLattice& L,
                                              const QMat& extra_rows) {
  const std::size_t n = L.rank();
  Int den = 1;
  for (std::size_t i = 0; i < extra_rows.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j)
      den = lcm(den, Int(extra_rows(i, j).get_den()));
  IMat stack(n + extra_rows.rows(), n);
  for (std::size_t i = 0; i < n; ++i) stack(i, i) = den;
  for (std::size_t i = 0; i < extra_rows.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rat x = extra_rows(i, j) * Rat(den);
      if (x.get_den() != 1) throw std::logic_error("overlattice: denominator");
      stack(n + i, j) = x.get_num();
    }
  IMat h = hnf(stack);
  QMat basis(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) basis(i, j) = make_rat(h(i, j), den);
  QMat gq = basis * to_rat(L.gram()) * basis.transposed();
  IMat gram(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (gq(i, j).get_den() != 1)
        throw std::domain_error("overlattice: not integral");
      gram(i, j) = gq(i, j).get_num();
    }
  IntegerLattice out(gram);
  if (!out.is_even()) throw std::domain_error("overlattice: not even");
  return {out, basis};
}

std::vector<OverlatticeResult> even_overlattices(const IntegerLattice& L,
                                                 const Int& p) {
  std::vector<OverlatticeResult> out;
  DiscriminantForm D = discriminant_form(L);
  const auto& F = D.form;
  const std::size_t m = F.num_gens();
  // p-torsion: coordinates are multiples of d_i/p where p | d_i
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m; ++i)
    if (divides(p, F.orders()[i])) idx.push_back(i);
  if (idx.empty()) return out;
  std::set<std::string> seen;
  IVec x(m, Int(0));
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == idx.size()) {
      if (F.is_zero_elt(x)) return;
      if (F.q_of(x) != 0) return;
      // canonical generator of <x>: smallest scalar multiple key
      std::string best;
      for (Int t = 1; t < p; ++t) {
        IVec y = F.scale(x, t);
        std::string s;
        for (const auto& e : y) s += e.get_str() + ",";
        if (best.empty() || s < best) best = s;
      }
      if (!seen.insert(best).second) return;
      QMat extra(1, L.rank());
      for (std::size_t c = 0; c < L.rank(); ++c) {
        Rat acc(0);
        for (std::size_t i = 0; i < m; ++i)
          if (x[i] != 0) acc += Rat(x[i]) * D.generators(i, c);
        extra(0, c) = acc;
      }
      out.push_back(overlattice_from_generators(L, extra));
      return;
    }
    std::size_t i = idx[k];
    Int step = divexact(F.orders()[i], p);
    for (Int t = 0; t < p; ++t) {
      x[i] = t * step;
      rec(k + 1);
    }
    x[i] = 0;
  };
  rec(0);
  return out;
}

namespace {

// first isotropic prime-order element in deterministic scan order, if any
std::optional<QVec> first_isotropic_vector(const IntegerLattice& L) {
  DiscriminantForm D = discriminant_form(L);
  const auto& F = D.form;
  const std::size_t m = F.num_gens();
  if (m == 0) return std::nullopt;
  std::vector<Int> primes = prime_divisors(F.group_order());
  for (const auto& p : primes) {
    std::optional<IVec> found;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m; ++i)
      if (divides(p, F.orders()[i])) idx.push_back(i);
    IVec x(m, Int(0));
    std::function<bool(std::size_t)> rec = [&](std::size_t k) -> bool {
      if (k == idx.size()) {
        if (F.is_zero_elt(x)) return false;
        if (F.q_of(x) != 0) return false;
        found = x;
        return true;
      }
      std::size_t i = idx[k];
      Int step = divexact(F.orders()[i], p);
      for (Int t = 0; t < p; ++t) {
        x[i] = t * step;
        if (rec(k + 1)) return true;
      }
      x[i] = 0;
      return false;
    };
    if (rec(0) && found) {
      QVec w(L.rank(), Rat(0));
      for (std::size_t c = 0; c < L.rank(); ++c)
        for (std::size_t i = 0; i < m; ++i)
          if ((*found)[i] != 0) w[c] += Rat((*found)[i]) * D.generators(i, c);
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace

OverlatticeResult maximal_even_overlattice(const IntegerLattice& L) {
  IntegerLattice cur = L;
  QMat basis = QMat::identity(L.rank());
  for (int step = 0; step < 200; ++step) {
    auto w = first_isotropic_vector(cur);
    if (!w) return {cur, basis};
    QMat extra(1, cur.rank());
    for (std::size_t c = 0; c < cur.rank(); ++c) extra(0, c) = (*w)[c];
    auto res = overlattice_from_generators(cur, extra);
    basis = res.basis * basis;
    cur = res.lattice;
  }
  throw std::logic_error("maximal_even_overlattice: chain too long");
}

std::vector<OverlatticeResult> all_even_overlattices(const IntegerLattice& L) {
  // BFS over index-p steps; dedup by the overlattice basis HNF key in
  // L-coordinates.
  std::vector<OverlatticeResult> out;
  std::map<std::string, OverlatticeResult> frontier, seen;
  OverlatticeResult self{L, QMat::identity(L.rank())};
  auto key_of = [](const QMat& b) {
    std::string s;
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) s += b(i, j).get_str() + ",";
    return s;
  };
  // canonical basis via scaled HNF
  auto canon = [&](const QMat& b) {
    Int den = 1;
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j)
        den = lcm(den, Int(b(i, j).get_den()));
    IMat ib(b.rows(), b.cols());
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) {
        Rat x = b(i, j) * Rat(den);
        ib(i, j) = x.get_num();
      }
    IMat h = hnf(ib);
    QMat res(b.rows(), b.cols());
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) res(i, j) = make_rat(h(i, j), den);
    return res;
  };
  self.basis = canon(self.basis);
  frontier.emplace(key_of(self.basis), self);
  while (!frontier.empty()) {
    std::map<std::string, OverlatticeResult> next;
    for (auto& [k, ol] : frontier) {
      if (seen.count(k)) continue;
      seen.emplace(k, ol);
      for (const auto& p : prime_divisors(ol.lattice.disc())) {
        for (auto& up : even_overlattices(ol.lattice, p)) {
          OverlatticeResult lifted{up.lattice, canon(up.basis * ol.basis)};
          std::string kk = key_of(lifted.basis);
          if (!seen.count(kk)) next.emplace(kk, lifted);
        }
      }
    }
    frontier = std::move(next);
  }
  for (auto& [k, ol] : seen) out.push_back(ol);
  return out;
}

std::vector<OverlatticeResult> all_maximal_even_overlattices(
    const IntegerLattice& L) {
  std::vector<OverlatticeResult> out;
  for (auto& ol : all_even_overlattices(L)) {
    const IntegerLattice& M = ol.lattice;
    if (M.disc() == 1 || !first_isotropic_vector(M).has_value())
      out.push_back(ol);
  }
  return out;
}

std::vector<OverlatticeResult> intermediate_overlattices(
    const IntegerLattice& L, const QMat& m_basis) {
  // Lattices between L and M correspond to subgroups of M/L. Enumerate all
  // even overlattices of L and keep those inside M.
  std::vector<OverlatticeResult> out;
  QMat m_inv = inverse(m_basis);
  for (auto& ol : all_even_overlattices(L)) {
    // contained in M iff basis * m_basis^{-1} is integral
    QMat c = ol.basis * m_inv;
    bool ok = true;
    for (std::size_t i = 0; i < c.rows() && ok; ++i)
      for (std::size_t j = 0; j < c.cols(); ++j)
        if (c(i, j).get_den() != 1) {
          ok = false;
          break;
        }
    if (ok) out.push_back(ol);
  }
  return out;
}

std::vector<PrimitiveExtension> primitive_extensions(const IntegerLattice& M,
                                                     const IntegerLattice& N,
                                                     const Int& index) {
  if (index <= 0) throw std::invalid_argument("primitive_extensions: index");
  std::vector<PrimitiveExtension> out;
  IntegerLattice sum = M.direct_sum(N);
  if (index == 1) {
    out.push_back({sum, QMat::identity(sum.rank())});
    return out;
  }
  DiscriminantForm DM = discriminant_form(M);
  DiscriminantForm DN = discriminant_form(N);
  auto hm = subgroups_of_order(DM.form, index);
  auto hn = subgroups_of_order(DN.form, index);
  const std::size_t rm = M.rank(), rn = N.rank();
  for (const auto& HM : hm) {
    for (const auto& HN : hn) {
      for (const auto& gamma : anti_isometries(HM, HN)) {
        // glue vectors: (lift of h, lift of gamma(h)) for subgroup gens h
        const IMat& gm = HM.gens_in_parent();
        QMat extra(gm.rows(), rm + rn);
        for (std::size_t r = 0; r < gm.rows(); ++r) {
          // lift generator r of H_M
          for (std::size_t c = 0; c < rm; ++c) {
            Rat acc(0);
            for (std::size_t i = 0; i < DM.form.num_gens(); ++i)
              if (gm(r, i) != 0) acc += Rat(gm(r, i)) * DM.generators(i, c);
            extra(r, c) = acc;
          }
          // image gamma(gen r) expressed against H_N generators
          const IMat& gn = HN.gens_in_parent();
          IVec img(DN.form.num_gens(), Int(0));
          for (std::size_t t = 0; t < gn.rows(); ++t)
            for (std::size_t i = 0; i < DN.form.num_gens(); ++i)
              img[i] += gamma(r, t) * gn(t, i);
          img = DN.form.reduce(img);
          for (std::size_t c = 0; c < rn; ++c) {
            Rat acc(0);
            for (std::size_t i = 0; i < DN.form.num_gens(); ++i)
              if (img[i] != 0) acc += Rat(img[i]) * DN.generators(i, c);
            extra(r, rm + c) = acc;
          }
        }
        auto res = overlattice_from_generators(sum, extra);
        // sanity: the glue index must be exactly `index`
        Int got = lattice_index(res.basis, QMat::identity(rm + rn));
        if (got != index)
          throw std::logic_error("primitive_extensions: index mismatch");
        out.push_back({res.lattice, res.basis});
      }
    }
  }
  return out;
}

}  // namespace hyperlat
