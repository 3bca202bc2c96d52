#include "hyperlat/spinor.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hyperlat {

std::uint8_t square_class(const Rat& x, const Int& p) {
  if (x == 0) throw std::domain_error("square_class: zero");
  long v = valuation(x, p);
  Int num = x.get_num(), den = x.get_den();
  Int un, ud;
  remove_p(num, p, un);
  remove_p(den, p, ud);
  std::uint8_t out = static_cast<std::uint8_t>(((v % 2) + 2) % 2);
  if (p == 2) {
    Int u8 = fdiv_r(un * mod_inverse(fdiv_r(ud, 8), 8), 8);
    long u = u8.get_si();
    if (u == 3 || u == 7) out |= 2;
    if (u == 5 || u == 7) out |= 4;
  } else {
    Int up = fdiv_r(un * mod_inverse(fdiv_r(ud, p), p), p);
    if (legendre(up, p) == -1) out |= 2;
  }
  return out;
}

namespace {

std::vector<std::uint8_t> group_closure(std::set<std::uint8_t> gens) {
  std::set<std::uint8_t> g{0};
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::uint8_t> cur(g.begin(), g.end());
    for (auto a : cur)
      for (auto b : gens)
        if (g.insert(a ^ b).second) grew = true;
  }
  return {g.begin(), g.end()};
}

}  // namespace

LocalSpinorNorms local_spinor_norms(const IntegerLattice& L, const Int& p) {
  const std::size_t n = L.rank();
  if (L.det() == 0) throw std::invalid_argument("local_spinor_norms: degenerate");
  JordanSplit js = jordan_split(to_rat(L.gram()), p);
  QMat gq = to_rat(L.gram());
  long smax = 0;
  for (long s : js.scales) smax = std::max(smax, s);

  // candidate reflection vectors over the Jordan basis
  std::vector<QVec> cands;
  auto add_cand = [&](const QVec& v) {
    bool zero = true;
    for (const auto& e : v)
      if (e != 0) zero = false;
    if (!zero) cands.push_back(v);
  };
  auto jrow = [&](std::size_t i) { return js.basis.row(i); };
  std::vector<Int> units = p == 2 ? std::vector<Int>{1, 3, 5, 7}
                                  : std::vector<Int>{1};
  if (p != 2) {
    // one quadratic nonresidue
    for (Int u = 2; u < p; ++u)
      if (legendre(u, p) == -1) {
        units.push_back(u);
        break;
      }
  }
  std::vector<Int> powers;
  for (long a = 0; a <= smax + 2; ++a) powers.push_back(pow_int(p, a));
  for (std::size_t i = 0; i < n; ++i) add_cand(jrow(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      for (const auto& pw : powers)
        for (const auto& u : units)
          for (int sgn : {1, -1}) {
            QVec v = jrow(i);
            QVec w = jrow(j);
            for (std::size_t c = 0; c < n; ++c)
              v[c] += Rat(sgn * u * pw) * w[c];
            add_cand(v);
          }
    }
  // a few triples
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        for (const auto& pw : powers)
          for (const auto& pw2 : powers)
            for (const auto& u : units)
              for (int s1 : {1, -1})
                for (int s2 : {1, -1}) {
                  QVec v = jrow(i);
                  QVec w = jrow(j);
                  QVec z = jrow(k);
                  for (std::size_t c = 0; c < n; ++c)
                    v[c] += Rat(s1 * pw) * w[c] + Rat(s2 * u * pw2) * z[c];
                  add_cand(v);
                }

  std::set<std::uint8_t> norm_classes;
  for (const auto& x : cands) {
    Rat norm = dot(x, gq, x);
    if (norm == 0) continue;
    // s_x preserves L tensor Z_p iff 2 (x . e_c) / norm is p-integral for
    // every basis vector e_c of L.
    bool ok = true;
    for (std::size_t c = 0; c < n && ok; ++c) {
      Rat ip(0);
      for (std::size_t d = 0; d < n; ++d) ip += gq(c, d) * x[d];
      if (ip == 0) continue;
      Rat coef = Rat(2) * ip / norm;
      // the reflection subtracts coef * x; need coef * x_d p-integral
      for (std::size_t d = 0; d < n && ok; ++d) {
        if (x[d] == 0) continue;
        Rat entry = coef * x[d];
        if (entry != 0 && valuation(entry, p) < 0) ok = false;
      }
    }
    if (!ok) continue;
    norm_classes.insert(square_class(norm, p));
  }
  if (norm_classes.empty())
    throw std::logic_error("local_spinor_norms: no lattice reflection found");

  LocalSpinorNorms out;
  out.p = p;
  out.improper_shift = *norm_classes.begin();
  std::set<std::uint8_t> pair_gens;
  for (auto a : norm_classes)
    for (auto b : norm_classes) pair_gens.insert(a ^ b);
  out.theta_plus = group_closure(pair_gens);
  return out;
}

bool SpinorData::in_span(std::uint32_t v) const {
  std::uint32_t cur = v;
  for (auto b : span) {
    if (b == 0) continue;
    std::uint32_t pivot = 1u << (31 - __builtin_clz(b));
    if (cur & pivot) cur ^= b;
  }
  return cur == 0;
}

std::uint32_t SpinorData::class_vector(const Rat& r) const {
  std::uint32_t v = 0;
  std::size_t off = 0;
  for (const auto& p : primes) {
    std::uint8_t c = square_class(r, p);
    int d = p == 2 ? 3 : 2;
    v |= static_cast<std::uint32_t>(c) << off;
    off += d;
  }
  return v;
}

namespace {

// echelonize a list of F2 vectors; result has distinct highest-bit pivots,
// sorted so reduction in order is complete.
std::vector<std::uint32_t> echelonize(const std::vector<std::uint32_t>& rows) {
  std::map<int, std::uint32_t> by_pivot;  // pivot bit index -> row
  for (auto r0 : rows) {
    std::uint32_t r = r0;
    while (r != 0) {
      int pb = 31 - __builtin_clz(r);
      auto it = by_pivot.find(pb);
      if (it == by_pivot.end()) {
        by_pivot.emplace(pb, r);
        break;
      }
      r ^= it->second;
    }
  }
  std::vector<std::uint32_t> basis;
  for (auto it = by_pivot.rbegin(); it != by_pivot.rend(); ++it)
    basis.push_back(it->second);
  return basis;
}

}  // namespace

SpinorData spinor_data(const IntegerLattice& L) {
  SpinorData sd;
  sd.primes = prime_divisors(2 * L.disc());
  std::sort(sd.primes.begin(), sd.primes.end());
  std::vector<std::uint32_t> rows;
  std::size_t off = 0;
  std::uint32_t shift = 0;
  std::vector<std::size_t> offsets;
  for (const auto& p : sd.primes) {
    offsets.push_back(off);
    LocalSpinorNorms ln = local_spinor_norms(L, p);
    for (auto m : ln.theta_plus)
      if (m) rows.push_back(static_cast<std::uint32_t>(m) << off);
    shift |= static_cast<std::uint32_t>(ln.improper_shift) << off;
    off += ln.dim();
  }
  sd.total_dim = off;
  // rational relations: -1 and each prime of P
  {
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < sd.primes.size(); ++i)
      v |= static_cast<std::uint32_t>(square_class(Rat(-1), sd.primes[i]))
           << offsets[i];
    rows.push_back(v);
  }
  for (const auto& q : sd.primes) {
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < sd.primes.size(); ++i)
      v |= static_cast<std::uint32_t>(square_class(Rat(q), sd.primes[i]))
           << offsets[i];
    rows.push_back(v);
  }
  sd.span = echelonize(rows);
  sd.improper_shift = shift;
  sd.spinor_genera_log2 = sd.total_dim - sd.span.size();
  return sd;
}

bool is_single_spinor_genus(const IntegerLattice& L) {
  Signature s = signature(L);
  if (!s.indefinite() || s.rank() < 3 || s.n_zero != 0)
    throw std::invalid_argument("is_single_spinor_genus: need indefinite rank >= 3");
  return spinor_data(L).spinor_genera_log2 == 0;
}

bool is_improper_spinor_generator(const Rat& r, const IntegerLattice& L) {
  Signature s = signature(L);
  if (!s.indefinite() || s.rank() < 3 || s.n_zero != 0)
    throw std::invalid_argument(
        "is_improper_spinor_generator: need indefinite rank >= 3");
  SpinorData sd = spinor_data(L);
  std::uint32_t v = sd.class_vector(r);
  return sd.in_span(v) || sd.in_span(v ^ sd.improper_shift);
}

}  // namespace hyperlat
