#include "hyperlat/genus.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "hyperlat/binary_forms.hpp"

namespace hyperlat {

namespace {

long val_or_big(const Rat& x, const Int& p) {
  if (x == 0) return 1000000;
  return valuation(x, p);
}

// odd unit class mod 2^k of a rational with odd denominator times 2^j
Int unit_class_mod(const Rat& x, const Int& p, long k) {
  Int num = x.get_num(), den = x.get_den();
  Int un, ud;
  remove_p(num, p, un);
  remove_p(den, p, ud);
  Int m = pow_int(p, k);
  return fdiv_r(fdiv_r(un, m) * mod_inverse(fdiv_r(ud, m), m), m);
}

}  // namespace

JordanSplit jordan_split(const QMat& gram, const Int& p) {
  const std::size_t n = gram.rows();
  QMat a = gram;
  QMat basis = QMat::identity(n);
  JordanSplit out;
  std::size_t pos = 0;
  auto swap_rc = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < n; ++c) std::swap(a(i, c), a(j, c));
    for (std::size_t c = 0; c < n; ++c) std::swap(a(c, i), a(c, j));
    for (std::size_t c = 0; c < n; ++c) std::swap(basis(i, c), basis(j, c));
  };
  auto row_op = [&](std::size_t dst, std::size_t src, const Rat& f) {
    // dst <- dst - f * src, symmetric
    for (std::size_t c = 0; c < n; ++c) a(dst, c) -= f * a(src, c);
    for (std::size_t c = 0; c < n; ++c) a(c, dst) -= f * a(c, src);
    for (std::size_t c = 0; c < n; ++c) basis(dst, c) -= f * basis(src, c);
  };
  while (pos < n) {
    // minimum valuation in the trailing block
    long minv = 1000000;
    std::size_t bi = pos, bj = pos;
    for (std::size_t i = pos; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        long v = val_or_big(a(i, j), p);
        if (v < minv) {
          minv = v;
          bi = i;
          bj = j;
        }
      }
    if (minv == 1000000)
      throw std::domain_error("jordan_split: degenerate form");
    bool diag_hit = false;
    std::size_t di = pos;
    for (std::size_t i = pos; i < n; ++i)
      if (val_or_big(a(i, i), p) == minv) {
        diag_hit = true;
        di = i;
        break;
      }
    if (!diag_hit && p != 2) {
      // odd p: fold row j into i to put the minimum on the diagonal
      row_op(bi, bj, Rat(-1));  // adds row bj (f = -1)
      diag_hit = true;
      di = bi;
    }
    if (diag_hit) {
      swap_rc(pos, di);
      for (std::size_t r = pos + 1; r < n; ++r) {
        if (a(r, pos) == 0) continue;
        row_op(r, pos, a(r, pos) / a(pos, pos));
      }
      out.scales.push_back(minv);
      QMat blk(1, 1);
      blk(0, 0) = a(pos, pos);
      out.blocks.push_back(blk);
      pos += 1;
    } else {
      // p = 2, strictly dominant off-diagonal: 2x2 even block
      swap_rc(pos, bi);
      std::size_t j2 = (bj == pos) ? bi : bj;
      swap_rc(pos + 1, j2);
      Rat det2 = a(pos, pos) * a(pos + 1, pos + 1) - a(pos, pos + 1) * a(pos, pos + 1);
      if (det2 == 0) throw std::logic_error("jordan_split: singular 2x2 pivot");
      for (std::size_t r = pos + 2; r < n; ++r) {
        Rat x = a(r, pos), y = a(r, pos + 1);
        if (x == 0 && y == 0) continue;
        // (alpha, beta) = (x, y) * B^{-1}
        Rat alpha = (x * a(pos + 1, pos + 1) - y * a(pos, pos + 1)) / det2;
        Rat beta = (y * a(pos, pos) - x * a(pos, pos + 1)) / det2;
        if (alpha != 0) row_op(r, pos, alpha);
        if (beta != 0) row_op(r, pos + 1, beta);
      }
      out.scales.push_back(minv);
      QMat blk(2, 2);
      blk(0, 0) = a(pos, pos);
      blk(0, 1) = a(pos, pos + 1);
      blk(1, 0) = a(pos + 1, pos);
      blk(1, 1) = a(pos + 1, pos + 1);
      out.blocks.push_back(blk);
      pos += 2;
    }
  }
  out.basis = basis;
  return out;
}

JordanDecomposition jordan_decomposition(const IntegerLattice& L, const Int& p) {
  if (L.det() == 0)
    throw std::invalid_argument("jordan_decomposition: degenerate");
  JordanSplit js = jordan_split(to_rat(L.gram()), p);
  std::map<long, std::vector<std::size_t>> by_scale;
  for (std::size_t b = 0; b < js.blocks.size(); ++b)
    by_scale[js.scales[b]].push_back(b);
  JordanDecomposition out;
  out.p = p;
  for (auto& [scale, idxs] : by_scale) {
    JordanConstituent c;
    c.scale = scale;
    if (p == 2) {
      Int det8 = 1;
      int oddity = 0;
      bool any_odd = false;
      std::size_t rank = 0;
      for (auto b : idxs) {
        const QMat& blk = js.blocks[b];
        if (blk.rows() == 1) {
          Rat u = blk(0, 0) / Rat(pow_int(2, scale));
          Int u8 = unit_class_mod(u, 2, 3);
          det8 = fdiv_r(det8 * u8, 8);
          oddity = (oddity + static_cast<int>(u8.get_si())) % 8;
          any_odd = true;
          rank += 1;
        } else {
          // even 2x2 block: det/beta^2 is -1 mod 8 for U-type, 3 for V-type
          Rat d2 = blk(0, 0) * blk(1, 1) - blk(0, 1) * blk(0, 1);
          Rat ratio = d2 / (blk(0, 1) * blk(0, 1));
          Int r8 = unit_class_mod(ratio, 2, 3);
          det8 = fdiv_r(det8 * r8, 8);
          rank += 2;
        }
      }
      c.rank = rank;
      c.det_mod8 = det8;
      c.even_type = !any_odd;
      c.oddity = any_odd ? oddity : 0;
      c.eps = (det8 == 1 || det8 == 7) ? 1 : -1;
    } else {
      Int prod = 1;
      for (auto b : idxs) {
        Rat u = js.blocks[b](0, 0) / Rat(pow_int(p, scale));
        prod = fdiv_r(prod * unit_class_mod(u, p, 1), p);
      }
      c.rank = idxs.size();
      c.eps = legendre(prod, p);
    }
    out.constituents.push_back(c);
  }
  return out;
}

GenusSymbol genus_symbol(const IntegerLattice& L) {
  GenusSymbol g;
  g.sig = signature(L);
  g.det = L.det();
  if (g.det == 0) throw std::invalid_argument("genus_symbol: degenerate");
  for (const auto& p : prime_divisors(2 * g.det))
    g.local.emplace(p, jordan_decomposition(L, p));
  return g;
}

std::string genus_symbol_string(const IntegerLattice& L) {
  GenusSymbol g = genus_symbol(L);
  std::ostringstream os;
  os << "(" << g.sig.n_plus << "," << g.sig.n_minus << ")";
  for (auto& [p, jd] : g.local) {
    os << " " << p.get_str() << ":";
    bool first = true;
    for (auto& c : jd.constituents) {
      if (!first) os << ".";
      first = false;
      if (p == 2) {
        os << pow_int(2, c.scale).get_str() << "^" << (c.eps > 0 ? "+" : "-")
           << c.rank;
        if (c.even_type)
          os << "_II";
        else
          os << "_" << c.oddity;
      } else {
        os << pow_int(p, c.scale).get_str() << "^" << (c.eps > 0 ? "+" : "-")
           << c.rank;
      }
    }
  }
  return os.str();
}

std::string genus_hash(const IntegerLattice& L) {
  // signature + canonical odd-p symbols + (rank, scale, parity) at 2
  Signature s = signature(L);
  Int d = L.det();
  if (d == 0) throw std::invalid_argument("genus_hash: degenerate");
  std::ostringstream os;
  os << s.n_plus << "," << s.n_minus << ";";
  for (const auto& p : prime_divisors(2 * d)) {
    JordanDecomposition jd = jordan_decomposition(L, p);
    os << p.get_str() << ":";
    for (auto& c : jd.constituents) {
      if (p == 2)
        os << c.scale << "." << c.rank << "." << (c.even_type ? "II" : "I")
           << "|";
      else
        os << c.scale << "." << c.rank << "." << c.eps << "|";
    }
    os << ";";
  }
  return os.str();
}

bool same_genus(const IntegerLattice& L1, const IntegerLattice& L2) {
  if (L1.det() == 0 || L2.det() == 0)
    throw std::invalid_argument("same_genus: degenerate");
  if (signature(L1) != signature(L2)) return false;
  if (L1.det() != L2.det()) return false;
  IntegerLattice a = L1, b = L2;
  if (!a.is_even() || !b.is_even()) {
    a = a.rescaled(2);
    b = b.rescaled(2);
  }
  // odd primes: Jordan invariants are a complete local invariant
  for (const auto& p : prime_divisors(a.disc())) {
    if (p == 2) continue;
    JordanDecomposition j1 = jordan_decomposition(a, p);
    JordanDecomposition j2 = jordan_decomposition(b, p);
    if (j1.constituents.size() != j2.constituents.size()) return false;
    for (std::size_t i = 0; i < j1.constituents.size(); ++i) {
      const auto& c1 = j1.constituents[i];
      const auto& c2 = j2.constituents[i];
      if (c1.scale != c2.scale || c1.rank != c2.rank || c1.eps != c2.eps)
        return false;
    }
  }
  // p = 2: compare the 2-components of the discriminant forms exactly
  DiscriminantForm d1 = discriminant_form(a);
  DiscriminantForm d2 = discriminant_form(b);
  FiniteQuadraticForm c1 = d1.form.p_component(2, nullptr);
  FiniteQuadraticForm c2 = d2.form.p_component(2, nullptr);
  return c1.is_isomorphic_to(c2);
}

std::map<long, FiniteQuadraticForm> homogeneous_decomposition(
    const FiniteQuadraticForm& A, const Int& p) {
  std::map<long, FiniteQuadraticForm> pieces;
  std::vector<IVec> gens0;
  FiniteQuadraticForm cur = A.p_component(p, &gens0);
  // work purely with abstract forms; re-normalize through SubgroupWithForm
  auto add_piece = [&](long k, const FiniteQuadraticForm& f) {
    auto it = pieces.find(k);
    if (it == pieces.end())
      pieces.emplace(k, f);
    else
      it->second = it->second.direct_sum(f);
  };
  int guard = 0;
  while (cur.num_gens() > 0) {
    if (++guard > 200) throw std::logic_error("homogeneous_decomposition: runaway");
    const Int K = cur.orders().back();
    long k = valuation(K, p);
    Int pk = pow_int(p, k);
    // find an order-K element with b(x,x) of full denominator (odd type at 2)
    std::optional<IVec> split1;
    cur.for_each_element([&](const IVec& x) {
      if (split1) return;
      if (cur.order_of(x) != K) return;
      if (p == 2) {
        // q(x) = odd / 2^k
        Rat qv = cur.q_of(x);
        if (qv != 0 && Int(qv.get_den()) == pk &&
            fdiv_r(Int(qv.get_num()), 2) != 0)
          split1 = x;
      } else {
        Rat bv = cur.b_of(x, x);
        if (bv != 0 && Int(bv.get_den()) == pk) split1 = x;
      }
    });
    if (split1) {
      const IVec& x = *split1;
      QMat q1(1, 1);
      q1(0, 0) = cur.q_of(x);
      add_piece(k, FiniteQuadraticForm({K}, q1));
      // complement: g' = g - t x with t = b(g,x)/b(x,x) mod p^k
      Rat bxx = cur.b_of(x, x);
      Int bxx_i = Int(bxx.get_num()) * divexact(pk, Int(bxx.get_den()));
      Int inv = mod_inverse(fdiv_r(bxx_i, pk), pk);
      IMat comp(cur.num_gens(), cur.num_gens());
      for (std::size_t gi = 0; gi < cur.num_gens(); ++gi) {
        IVec g(cur.num_gens(), Int(0));
        g[gi] = 1;
        Rat bg = cur.b_of(g, x);
        Int bg_i = bg == 0 ? Int(0)
                           : Int(bg.get_num()) * divexact(pk, Int(bg.get_den()));
        Int t = fdiv_r(bg_i * inv, pk);
        IVec gp = cur.add(g, cur.scale(x, pk - t));  // g - t x
        comp.set_row(gi, gp);
      }
      SubgroupWithForm sub(cur, comp);
      if (sub.order() * K != cur.group_order())
        throw std::logic_error("homogeneous_decomposition: bad 1-dim split");
      cur = sub.form();
    } else {
      if (p != 2)
        throw std::logic_error("homogeneous_decomposition: no odd-p splitter");
      // even type: find x of order K and a partner with full-denominator b
      std::optional<std::pair<IVec, IVec>> pair;
      cur.for_each_element([&](const IVec& x) {
        if (pair) return;
        if (cur.order_of(x) != K) return;
        for (std::size_t gi = 0; gi < cur.num_gens(); ++gi) {
          IVec g(cur.num_gens(), Int(0));
          g[gi] = 1;
          Rat bv = cur.b_of(x, g);
          if (bv != 0 && Int(bv.get_den()) == pk) {
            pair = std::make_pair(x, g);
            return;
          }
        }
      });
      if (!pair) throw std::logic_error("homogeneous_decomposition: stuck at 2");
      const IVec& x = pair->first;
      const IVec& y = pair->second;
      QMat q2(2, 2);
      q2(0, 0) = cur.q_of(x);
      q2(0, 1) = cur.b_of(x, y);
      q2(1, 0) = q2(0, 1);
      q2(1, 1) = cur.q_of(y);
      add_piece(k, FiniteQuadraticForm({K, K}, q2));
      // complement of <x, y>
      auto to_int_mod = [&](const Rat& v) -> Int {
        if (v == 0) return Int(0);
        return Int(v.get_num()) * divexact(pk, Int(v.get_den()));
      };
      Int bxx = to_int_mod(cur.b_of(x, x));
      Int bxy = to_int_mod(cur.b_of(x, y));
      Int byy = to_int_mod(cur.b_of(y, y));
      Int det2 = fdiv_r(bxx * byy - bxy * bxy, pk);
      Int dinv = mod_inverse(det2, pk);
      IMat comp(cur.num_gens(), cur.num_gens());
      for (std::size_t gi = 0; gi < cur.num_gens(); ++gi) {
        IVec g(cur.num_gens(), Int(0));
        g[gi] = 1;
        Int bgx = to_int_mod(cur.b_of(g, x));
        Int bgy = to_int_mod(cur.b_of(g, y));
        // (alpha, beta) = (bgx, bgy) * B^{-1} mod p^k
        Int alpha = fdiv_r((bgx * byy - bgy * bxy) * dinv, pk);
        Int beta = fdiv_r((bgy * bxx - bgx * bxy) * dinv, pk);
        IVec gp = cur.add(g, cur.add(cur.scale(x, pk - alpha),
                                     cur.scale(y, pk - beta)));
        comp.set_row(gi, gp);
      }
      SubgroupWithForm sub(cur, comp);
      if (sub.order() * K * K != cur.group_order())
        throw std::logic_error("homogeneous_decomposition: bad 2-dim split");
      cur = sub.form();
    }
  }
  return pieces;
}

namespace {

// q-value of the dual generator of the scale-k block <u * 2^k>, exactly.
Rat dual_q_value(const Int& u, long k) {
  // 1/(u 2^k) mod 2Z with denominator 2^k: u^{-1} mod 2^{k+1}
  Int m = pow_int(2, k + 1);
  Int ubar = mod_inverse(fdiv_r(u, m), m);
  return make_rat(ubar, pow_int(2, k));
}

// (Z/2^k)^2 forms of the scaled U and V blocks.
FiniteQuadraticForm u_block_form(long k) {
  Int pk = pow_int(2, k);
  QMat q(2, 2);
  q(0, 1) = make_rat(1, pk);
  q(1, 0) = make_rat(1, pk);
  return FiniteQuadraticForm({pk, pk}, q);
}

FiniteQuadraticForm v_block_form(long k) {
  Int pk = pow_int(2, k);
  Int m = pow_int(2, k + 1);
  Int inv3 = mod_inverse(Int(3), m);
  QMat q(2, 2);
  q(0, 0) = make_rat(fdiv_r(2 * inv3, m), pk);
  q(1, 1) = q(0, 0);
  q(0, 1) = make_rat(fdiv_r(-inv3, pk), pk);
  q(1, 0) = q(0, 1);
  return FiniteQuadraticForm({pk, pk}, q);
}

// All determinant classes mod 8 of unimodular 2-adic lattices of rank r whose
// scale-k discriminant form is isomorphic to `piece`.
std::set<Int> two_adic_lift_classes(const FiniteQuadraticForm& piece, long k) {
  std::set<Int> out;
  std::size_t r = piece.num_gens();
  // multisets over atoms <1>,<3>,<5>,<7> (rank 1) and U, V (rank 2)
  std::vector<Int> units{1, 3, 5, 7};
  std::function<void(std::size_t, std::size_t, FiniteQuadraticForm, Int)> rec =
      [&](std::size_t atom, std::size_t used, FiniteQuadraticForm acc, Int det) {
        if (used == r) {
          if (out.count(fdiv_r(det, 8))) return;
          if (acc.is_isomorphic_to(piece)) out.insert(fdiv_r(det, 8));
          return;
        }
        if (atom < 4) {
          // skip or use one more of this unit
          rec(atom + 1, used, acc, det);
          QMat q1(1, 1);
          q1(0, 0) = dual_q_value(units[atom], k);
          FiniteQuadraticForm one({pow_int(2, k)}, q1);
          rec(atom, used + 1, acc.direct_sum(one), det * units[atom]);
        } else if (atom == 4) {
          rec(atom + 1, used, acc, det);
          if (used + 2 <= r)
            rec(atom, used + 2, acc.direct_sum(u_block_form(k)), det * Int(-1));
        } else if (atom == 5) {
          if (used + 2 <= r) rec(atom, used + 2, acc.direct_sum(v_block_form(k)), det * Int(3));
        } else {
          return;
        }
      };
  rec(0, 0, FiniteQuadraticForm({}, QMat(0, 0)), Int(1));
  return out;
}

std::set<Int> setprod_mod8(const std::set<Int>& a, const std::set<Int>& b) {
  std::set<Int> out;
  for (const auto& x : a)
    for (const auto& y : b) out.insert(fdiv_r(x * y, 8));
  return out;
}

}  // namespace

bool exists_even_lattice(const Signature& sig, const FiniteQuadraticForm& D) {
  if (sig.n_zero != 0) return false;
  if (sig.n_plus < 0 || sig.n_minus < 0) return false;
  const long n = sig.rank();
  Int order = D.group_order();
  // rank bound
  for (const auto& p : prime_divisors(order))
    if (static_cast<long>(D.length_at(p)) > n) return false;
  if (n == 0) return order == 1;
  // Milgram
  int sigq = D.gauss_signature_mod8();
  int want = ((sig.n_plus - sig.n_minus) % 8 + 8) % 8;
  if (sigq != want) return false;
  Int target_det = (sig.n_minus % 2 == 0) ? order : -order;
  // local conditions
  std::vector<Int> ps = prime_divisors(2 * order);
  for (const auto& p : ps) {
    auto hom = homogeneous_decomposition(D, p);
    long lp = 0;
    for (auto& [k, f] : hom) lp += static_cast<long>(f.num_gens());
    long r0 = n - lp;
    if (r0 < 0) return false;
    if (p == 2) {
      if (r0 % 2 != 0) return false;
      std::set<Int> allowed{Int(1)};
      if (r0 > 0) {
        // even unimodular of rank r0: dets 7^{r0/2} and 3*7^{r0/2-1} mod 8
        Int a = fdiv_r(pow_int(Int(7), static_cast<unsigned long>(r0 / 2)), 8);
        Int b = fdiv_r(3 * pow_int(Int(7), static_cast<unsigned long>(r0 / 2 - (r0 >= 2 ? 1 : 0))), 8);
        allowed = {a, b};
      }
      for (auto& [k, piece] : hom) {
        auto cls = two_adic_lift_classes(piece, k);
        if (cls.empty()) return false;
        allowed = setprod_mod8(allowed, cls);
      }
      Int unit;
      remove_p(target_det, 2, unit);
      if (!allowed.count(fdiv_r(unit, 8))) return false;
    } else {
      if (r0 == 0) {
        int prod = 1;
        for (auto& [k, piece] : hom) {
          // eps_k = Legendre(det(p^k b-matrix), p)
          Int pk = pow_int(p, k);
          std::size_t rr = piece.num_gens();
          IMat bm(rr, rr);
          for (std::size_t i = 0; i < rr; ++i)
            for (std::size_t j = 0; j < rr; ++j) {
              IVec ei(rr, Int(0)), ej(rr, Int(0));
              ei[i] = 1;
              ej[j] = 1;
              Rat bv = piece.b_of(ei, ej);
              bm(i, j) = bv == 0 ? Int(0)
                                 : fdiv_r(Int(bv.get_num()) *
                                              divexact(pk, Int(bv.get_den())),
                                          pk);
            }
          Int dd = fdiv_r(det(bm), p);
          if (dd == 0)
            throw std::logic_error("exists_even_lattice: bad homogeneous det");
          prod *= legendre(dd, p);
        }
        Int unit;
        remove_p(target_det, p, unit);
        if (legendre(unit, p) != prod) return false;
      }
    }
  }
  return true;
}

namespace {

bool disc_form_matches(const IntegerLattice& L, const Signature& sig,
                       const FiniteQuadraticForm& D) {
  if (signature(L) != sig) return false;
  if (!L.is_even()) return false;
  DiscriminantForm dl = discriminant_form(L);
  return dl.form.is_isomorphic_to(D);
}

}  // namespace

IntegerLattice lattice_with_invariants(const Signature& sig,
                                       const FiniteQuadraticForm& D) {
  if (!exists_even_lattice(sig, D))
    throw std::domain_error("lattice_with_invariants: no such lattice");
  const long n = sig.rank();
  Int order = D.group_order();
  Int target_det = (sig.n_minus % 2 == 0) ? order : -order;
  if (n == 0) return IntegerLattice(IMat(0, 0));
  if (n == 1) {
    for (const Int& d : {Int(target_det), Int(-target_det)}) {
      if ((d > 0) != (sig.n_plus == 1)) continue;
      IntegerLattice L = lattice_rank1(d);
      if (disc_form_matches(L, sig, D)) return L;
    }
    throw std::logic_error("lattice_with_invariants: rank-1 mismatch");
  }
  if (n == 2) {
    for (auto& L : even_binary_classes(target_det)) {
      IntegerLattice cand = L;
      if (signature(cand) != sig) {
        // the enumerator returns negative definite for positive dets
        if (sig.positive_definite()) cand = IntegerLattice(-L.gram());
      }
      if (disc_form_matches(cand, sig, D)) return cand;
    }
    throw std::domain_error("lattice_with_invariants: rank-2 exhausted");
  }
  if (n != 3)
    throw std::invalid_argument("lattice_with_invariants: rank > 3");
  // rank 3: split off a vector: M ~ overlattice of [t] + N of index g
  Int tcap = 2 * (isqrt(16 * order) + 4);
  {
    Rat cr(order);
    // crude cube-root cap
    Int c = 2;
    while (c * c * c < 16 * order) ++c;
    tcap = 2 * c + 8;
  }
  for (Int g = 1; g <= 2 * tcap; ++g) {
    for (Int ta = 2; ta <= tcap * g; ta += 2) {
      for (const Int& t : {Int(ta), Int(-ta)}) {
        // complement determinant: det(N) = target_det * g^2 / t
        Int num = target_det * g * g;
        if (!divides(t, num)) continue;
        Int detn = divexact(num, t);
        // signature screen
        Signature nsig;
        if (t > 0) {
          nsig = Signature{sig.n_plus - 1, sig.n_minus, 0};
        } else {
          nsig = Signature{sig.n_plus, sig.n_minus - 1, 0};
        }
        if (nsig.n_plus < 0 || nsig.n_minus < 0) continue;
        if (nsig.negative_definite() && detn <= 0) continue;
        if (nsig.indefinite() && detn >= 0) continue;
        if (nsig.positive_definite() && detn <= 0) continue;
        std::vector<IntegerLattice> comps;
        if (nsig.negative_definite() || nsig.indefinite()) {
          comps = even_binary_classes(detn);
        } else {
          for (auto& c : even_binary_classes(detn))
            comps.emplace_back(-c.gram());
        }
        for (auto& N : comps) {
          if (signature(N) != nsig) continue;
          IntegerLattice split = lattice_rank1(t).direct_sum(N);
          if (g == 1) {
            if (disc_form_matches(split, sig, D)) return split;
            continue;
          }
          // overlattices of index g
          DiscriminantForm ds = discriminant_form(split);
          for (auto& H : subgroups_of_order(ds.form, g)) {
            // totally isotropic subgroups only
            bool iso = true;
            const IMat& gens = H.gens_in_parent();
            std::vector<IVec> els;
            H.form().for_each_element([&](const IVec& c) {
              IVec e(ds.form.num_gens(), Int(0));
              for (std::size_t r = 0; r < gens.rows(); ++r)
                for (std::size_t cc = 0; cc < ds.form.num_gens(); ++cc)
                  e[cc] += c[r] * gens(r, cc);
              els.push_back(ds.form.reduce(e));
            });
            for (const auto& e : els)
              if (ds.form.q_of(e) != 0) {
                iso = false;
                break;
              }
            if (!iso) continue;
            QMat extra(gens.rows(), split.rank());
            for (std::size_t r = 0; r < gens.rows(); ++r)
              for (std::size_t c = 0; c < split.rank(); ++c) {
                Rat acc(0);
                for (std::size_t i = 0; i < ds.form.num_gens(); ++i)
                  if (gens(r, i) != 0)
                    acc += Rat(gens(r, i)) * ds.generators(i, c);
                extra(r, c) = acc;
              }
            try {
              auto ol = overlattice_from_generators(split, extra);
              if (disc_form_matches(ol.lattice, sig, D)) return ol.lattice;
            } catch (const std::domain_error&) {
              continue;  // non-even glue
            }
          }
        }
      }
    }
  }
  throw std::logic_error("lattice_with_invariants: rank-3 search exhausted");
}

UnimodularGlue unimodular_glue(const IntegerLattice& L) {
  if (!L.is_even() || L.det() == 0)
    throw std::invalid_argument("unimodular_glue: need even nondegenerate");
  IntegerLattice sum = L.direct_sum(L.rescaled(-1));
  DiscriminantForm D = discriminant_form(L);
  const std::size_t n = L.rank();
  const std::size_t m = D.form.num_gens();
  QMat extra(m, 2 * n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      extra(r, c) = D.generators(r, c);
      extra(r, n + c) = D.generators(r, c);
    }
  auto res = overlattice_from_generators(sum, extra);
  if (abs(res.lattice.det()) != 1)
    throw std::logic_error("unimodular_glue: not unimodular");
  return {res.lattice, res.basis};
}

int milgram_signature(const IntegerLattice& L) {
  return discriminant_form(L).form.gauss_signature_mod8();
}

}  // namespace hyperlat
