#include "hyperlat/fqf.hpp"

#include <algorithm>
#include <cmath>
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

FiniteQuadraticForm::FiniteQuadraticForm(std::vector<Int> orders, QMat q)
    : orders_(std::move(orders)), q_(std::move(q)) {
  if (q_.rows() != orders_.size() || q_.cols() != orders_.size())
    throw std::invalid_argument("FiniteQuadraticForm: shape mismatch");
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    if (orders_[i] <= 1)
      throw std::invalid_argument("FiniteQuadraticForm: trivial order");
    q_(i, i) = mod2(q_(i, i));
    for (std::size_t j = 0; j < orders_.size(); ++j)
      if (i != j) q_(i, j) = mod1(q_(i, j));
  }
}

Int FiniteQuadraticForm::group_order() const {
  Int n = 1;
  for (const auto& d : orders_) n *= d;
  return n;
}

std::size_t FiniteQuadraticForm::length_at(const Int& p) const {
  std::size_t l = 0;
  for (const auto& d : orders_)
    if (divides(p, d)) ++l;
  return l;
}

IVec FiniteQuadraticForm::reduce(IVec x) const {
  for (std::size_t i = 0; i < orders_.size(); ++i) x[i] = fdiv_r(x[i], orders_[i]);
  return x;
}

IVec FiniteQuadraticForm::add(const IVec& x, const IVec& y) const {
  IVec z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    z[i] = fdiv_r(x[i] + y[i], orders_[i]);
  return z;
}

IVec FiniteQuadraticForm::scale(const IVec& x, const Int& t) const {
  IVec z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = fdiv_r(x[i] * t, orders_[i]);
  return z;
}

bool FiniteQuadraticForm::is_zero_elt(const IVec& x) const {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (fdiv_r(x[i], orders_[i]) != 0) return false;
  return true;
}

Int FiniteQuadraticForm::order_of(const IVec& x) const {
  Int o = 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Int xi = fdiv_r(x[i], orders_[i]);
    if (xi == 0) continue;
    Int d = orders_[i];
    Int g = gcd(xi, d);
    o = lcm(o, divexact(d, g));
  }
  return o;
}

Rat FiniteQuadraticForm::q_of(const IVec& x) const {
  Rat s(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    s += q_(i, i) * Rat(x[i] * x[i]);
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (x[j] != 0) s += Rat(2) * q_(i, j) * Rat(x[i] * x[j]);
  }
  return mod2(s);
}

Rat FiniteQuadraticForm::b_of(const IVec& x, const IVec& y) const {
  Rat s(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] == 0) continue;
      Rat bij = i == j ? q_(i, i) : q_(i, j);  // b(g_i,g_i) = q(g_i) mod 1? no:
      // b(x,x) = q(x) mod 1 only mod Z; the diagonal of q_ stores q, and
      // b(g_i,g_i) = q(g_i)/1 taken mod 1 via the polarization identity.
      if (i == j) bij = q_(i, i);  // q in Q/2Z; as a bilinear value use q mod 1
      s += bij * Rat(x[i] * y[j]);
    }
  }
  return mod1(s);
}

FiniteQuadraticForm FiniteQuadraticForm::negated() const {
  QMat q = q_;
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (std::size_t j = 0; j < q.cols(); ++j) q(i, j) = -q(i, j);
  return FiniteQuadraticForm(orders_, q);
}

FiniteQuadraticForm FiniteQuadraticForm::direct_sum(
    const FiniteQuadraticForm& o) const {
  std::size_t m = num_gens(), n = o.num_gens();
  std::vector<Int> orders = orders_;
  orders.insert(orders.end(), o.orders_.begin(), o.orders_.end());
  QMat q(m + n, m + n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) q(i, j) = q_(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(m + i, m + j) = o.q_(i, j);
  // re-normalize to invariant factors
  // (sum of invariant-factor groups need not be in invariant form; callers
  // that need canonical form go through SubgroupWithForm)
  return FiniteQuadraticForm(orders, q);
}

FiniteQuadraticForm FiniteQuadraticForm::p_component(
    const Int& p, std::vector<IVec>* gens) const {
  std::vector<IVec> pg;
  std::vector<Int> porders;
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    Int rest = orders_[i];
    long v = 0;
    if (divides(p, rest)) {
      Int unit;
      v = remove_p(orders_[i], p, unit);
      if (v > 0) {
        IVec g(num_gens(), Int(0));
        g[i] = unit;  // unit * g_i has order p^v
        pg.push_back(reduce(g));
        porders.push_back(pow_int(p, v));
      }
    }
  }
  QMat q(pg.size(), pg.size());
  for (std::size_t i = 0; i < pg.size(); ++i)
    for (std::size_t j = 0; j < pg.size(); ++j)
      q(i, j) = i == j ? q_of(pg[i]) : b_of(pg[i], pg[j]);
  if (gens) *gens = pg;
  return FiniteQuadraticForm(porders, q);
}

void FiniteQuadraticForm::for_each_element(
    const std::function<void(const IVec&)>& fn) const {
  IVec x(num_gens(), Int(0));
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == num_gens()) {
      fn(x);
      return;
    }
    for (Int t = 0; t < orders_[i]; ++t) {
      x[i] = t;
      rec(i + 1);
    }
    x[i] = 0;
  };
  rec(0);
}

std::vector<IVec> FiniteQuadraticForm::all_elements() const {
  std::vector<IVec> out;
  for_each_element([&](const IVec& x) { out.push_back(x); });
  return out;
}

int FiniteQuadraticForm::gauss_signature_mod8() const {
  long double re = 0, im = 0;
  const long double pi = 3.14159265358979323846L;
  Int n = group_order();
  if (n > 2000000)
    throw std::domain_error("gauss_signature_mod8: group too large");
  for_each_element([&](const IVec& x) {
    Rat qv = q_of(x);
    long double ang = pi * qv.get_d();
    re += cosl(ang);
    im += sinl(ang);
  });
  long double mag = sqrtl(re * re + im * im);
  long double expect = sqrtl(static_cast<long double>(n.get_d()));
  if (fabsl(mag - expect) > 1e-6L * expect + 1e-9L)
    throw std::logic_error("gauss_signature_mod8: degenerate form");
  long double arg = atan2l(im, re);  // = pi * sigma / 4
  long s = lroundl(arg * 4.0L / pi);
  if (fabsl(arg * 4.0L / pi - static_cast<long double>(s)) > 1e-4L)
    throw std::logic_error("gauss_signature_mod8: argument off-grid");
  return static_cast<int>(((s % 8) + 8) % 8);
}

std::vector<IMat> FiniteQuadraticForm::all_isometries(
    const FiniteQuadraticForm& target, int sign, bool first_only) const {
  std::vector<IMat> out;
  if (orders_ != target.orders_) return out;
  const std::size_t m = num_gens();
  if (m == 0) {
    out.push_back(IMat(0, 0));
    return out;
  }
  // candidate images per generator: right order, matching q
  std::vector<std::vector<IVec>> cands(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rat want = sign > 0 ? q_matrix()(i, i) : mod2(-q_matrix()(i, i));
    target.for_each_element([&](const IVec& y) {
      if (target.order_of(y) != orders_[i]) return;
      if (target.q_of(y) != want) return;
      cands[i].push_back(y);
    });
    if (cands[i].empty()) return out;
  }
  IMat img(m, m);
  std::function<bool(std::size_t)> bt = [&](std::size_t i) -> bool {
    if (i == m) {
      // surjectivity: images together with the relations span everything
      IMat stack(2 * m, m);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) stack(r, c) = img(r, c);
      for (std::size_t r = 0; r < m; ++r) stack(m + r, r) = target.orders_[r];
      IMat h = hnf(stack);
      Int dd = 1;
      for (std::size_t r = 0; r < m; ++r) dd *= h(r, r);
      if (dd != 1) return false;
      out.push_back(img);
      return first_only;
    }
    for (const auto& y : cands[i]) {
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        IVec prev = img.row(j);
        Rat bij = q_(i, j);  // b(g_i, g_j), stored off-diagonal
        Rat want = sign > 0 ? bij : mod1(-bij);
        if (target.b_of(y, prev) != want) ok = false;
      }
      if (!ok) continue;
      img.set_row(i, y);
      if (bt(i + 1)) return true;
    }
    return false;
  };
  bt(0);
  return out;
}

bool FiniteQuadraticForm::is_isomorphic_to(const FiniteQuadraticForm& o) const {
  if (orders_ != o.orders_) return false;
  if (num_gens() == 0) return true;
  // cheap invariant screen: multiset of (order, q) over all elements
  auto histo = [](const FiniteQuadraticForm& f) {
    std::map<std::pair<std::string, std::string>, long> h;
    f.for_each_element([&](const IVec& x) {
      h[{f.order_of(x).get_str(), f.q_of(x).get_str()}]++;
    });
    return h;
  };
  if (group_order() <= 65536) {
    if (histo(*this) != histo(o)) return false;
  }
  return !all_isometries(o, +1, /*first_only=*/true).empty();
}

namespace {

// canonical HNF key of a subgroup given generator rows, relations diag(d)
IMat subgroup_key(const std::vector<Int>& orders, const IMat& gens) {
  const std::size_t m = orders.size();
  IMat stack(gens.rows() + m, m);
  for (std::size_t r = 0; r < gens.rows(); ++r)
    for (std::size_t c = 0; c < m; ++c)
      stack(r, c) = fdiv_r(gens(r, c), orders[c]);
  for (std::size_t r = 0; r < m; ++r) stack(gens.rows() + r, r) = orders[r];
  IMat h = hnf(stack);
  return h.submatrix(0, 0, m, m);
}

}  // namespace

SubgroupWithForm::SubgroupWithForm(const FiniteQuadraticForm& parent,
                                   const IMat& generator_rows)
    : gens_in_parent_(generator_rows) {
  const std::size_t m = parent.num_gens();
  key_ = subgroup_key(parent.orders(), generator_rows);
  Int full = 1;
  for (const auto& d : parent.orders()) full *= d;
  Int idx = 1;
  for (std::size_t i = 0; i < m; ++i) idx *= key_(i, i);
  order_ = divexact(full, idx);
  // induced form: relations of the generator map Z^g -> parent
  const std::size_t g = generator_rows.rows();
  if (g == 0 || order_ == 1) {
    gens_in_parent_ = IMat(0, m);
    form_ = FiniteQuadraticForm({}, QMat(0, 0));
    return;
  }
  // relation lattice {c : c * gens == 0 in parent}
  IMat big(g + m, m);
  for (std::size_t r = 0; r < g; ++r)
    for (std::size_t c = 0; c < m; ++c) big(r, c) = generator_rows(r, c);
  for (std::size_t r = 0; r < m; ++r) big(g + r, r) = parent.orders()[r];
  IMat k = left_kernel(big);  // rows (c | t)
  IMat rel(k.rows(), g);
  for (std::size_t r = 0; r < k.rows(); ++r)
    for (std::size_t c = 0; c < g; ++c) rel(r, c) = k(r, c);
  IMat u, v;
  IMat s = snf(rel, &u, &v);
  // new generators: rows of V^{-1} * gens, orders = elementary divisors
  IMat vinv = to_int(inverse(to_rat(v)));
  IMat newgens_all = vinv * generator_rows;
  std::vector<Int> orders;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < g; ++i) {
    Int d = i < s.rows() && i < s.cols() ? s(i, i) : Int(0);
    if (d == 0)
      throw std::logic_error("SubgroupWithForm: infinite quotient");
    if (d > 1) {
      keep.push_back(i);
      orders.push_back(d);
    }
  }
  IMat newgens(keep.size(), m);
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t c = 0; c < m; ++c)
      newgens(i, c) = fdiv_r(newgens_all(keep[i], c), parent.orders()[c]);
  QMat q(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    IVec gi = newgens.row(i);
    for (std::size_t j = 0; j < keep.size(); ++j) {
      IVec gj = newgens.row(j);
      q(i, j) = i == j ? parent.q_of(gi) : parent.b_of(gi, gj);
    }
  }
  gens_in_parent_ = newgens;
  form_ = FiniteQuadraticForm(orders, q);
  Int check = 1;
  for (const auto& d : orders) check *= d;
  if (check != order_)
    throw std::logic_error("SubgroupWithForm: order mismatch");
}

std::vector<SubgroupWithForm> subgroups_of_order(const FiniteQuadraticForm& A,
                                                 const Int& n) {
  std::vector<SubgroupWithForm> out;
  if (!divides(n, A.group_order())) return out;
  const std::size_t m = A.num_gens();
  // BFS over orders by prime steps; dedup by canonical key
  std::map<std::string, IMat> level;  // key string -> generator rows
  auto key_str = [](const IMat& k) { return k.str(); };
  IMat trivial(0, m);
  level[key_str(subgroup_key(A.orders(), trivial))] = trivial;
  Int cur = 1;
  // factor n and walk up prime by prime in all interleavings: enumerate by
  // repeated single-prime extension over all primes of n/cur.
  std::function<void(const Int&, std::map<std::string, IMat>&)> grow =
      [&](const Int& reached, std::map<std::string, IMat>& lvl) {
        if (reached == n) return;
        std::map<std::string, IMat> next;
        for (const auto& p : prime_divisors(divexact(n, reached))) {
          for (const auto& [ks, gens] : lvl) {
            // elements x with p*x in S, x not in S
            IMat keymat = subgroup_key(A.orders(), gens);
            A.for_each_element([&](const IVec& x) {
              IVec px = A.scale(x, p);
              if (!hnf_contains(keymat, px)) return;
              if (hnf_contains(keymat, x)) return;
              IMat g2(gens.rows() + 1, m);
              for (std::size_t r = 0; r < gens.rows(); ++r)
                for (std::size_t c = 0; c < m; ++c) g2(r, c) = gens(r, c);
              for (std::size_t c = 0; c < m; ++c) g2(gens.rows(), c) = x[c];
              IMat k2 = subgroup_key(A.orders(), g2);
              next.emplace(key_str(k2), g2);
            });
          }
          // all subgroups of order reached*p found; recurse
          std::map<std::string, IMat> filtered;
          for (auto& [ks2, g2] : next) filtered.emplace(ks2, g2);
          grow(reached * p, filtered);
          if (reached * p == n)
            for (auto& [ks2, g2] : filtered)
              out.emplace_back(A, g2);
          next.clear();
        }
      };
  if (n == 1) {
    out.emplace_back(A, trivial);
    return out;
  }
  grow(cur, level);
  // dedup final output by key
  std::set<std::string> seen;
  std::vector<SubgroupWithForm> uniq;
  for (auto& s : out) {
    auto k = s.key().str();
    if (seen.insert(k).second) uniq.push_back(std::move(s));
  }
  return uniq;
}

std::vector<IMat> anti_isometries(const SubgroupWithForm& H1,
                                  const SubgroupWithForm& H2, bool first_only) {
  return H1.form().all_isometries(H2.form(), -1, first_only);
}

}  // namespace hyperlat
