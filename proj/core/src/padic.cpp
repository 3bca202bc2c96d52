#include "hyperlat/padic.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "hyperlat/genus.hpp"

namespace hyperlat {

namespace {
constexpr long kBigVal = 1000000;
}

long matrix_valuation(const QMat& m, const Int& p) {
  long v = kBigVal;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) v = std::min(v, valuation(m(i, j), p));
  return v;
}

long defect_valuation(const QMat& gram, const QMat& f, const Int& p) {
  return matrix_valuation(gram - f * gram * f.transposed(), p);
}

QMat reflection(const QMat& gram, const QVec& x) {
  const std::size_t n = gram.rows();
  Rat norm = dot(x, gram, x);
  if (norm == 0) throw std::domain_error("reflection: isotropic vector");
  QMat s = QMat::identity(n);
  QVec gx = mat_vec(gram, x);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      s(r, c) -= Rat(2) * gx[r] * x[c] / norm;
  return s;
}

QMat hensel_lift_isometry(const QMat& gram, QMat f, const Int& p,
                          long target_defect) {
  long d = defect_valuation(gram, f, p);
  for (int iter = 0; iter < 64; ++iter) {
    if (d >= target_defect) return f;
    QMat inv = inverse(gram * f.transposed());
    QMat defect = gram - f * gram * f.transposed();
    QMat delta = defect * inv;
    for (std::size_t i = 0; i < delta.rows(); ++i)
      for (std::size_t j = 0; j < delta.cols(); ++j)
        delta(i, j) /= Rat(2);
    QMat next = f + delta;
    long nd = defect_valuation(gram, next, p);
    if (nd <= d)
      throw std::domain_error("hensel_lift_isometry: defect too small to lift");
    f = next;
    d = nd;
  }
  throw std::logic_error("hensel_lift_isometry: iteration cap");
}

namespace {

IVec integerize_vec(const QVec& v) {
  Int den = 1;
  for (const auto& e : v) den = lcm(den, Int(e.get_den()));
  IVec w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rat s = v[i] * Rat(den);
    w[i] = s.get_num();
  }
  Int cont = content(w);
  if (cont > 1)
    for (auto& e : w) e = divexact(e, cont);
  return w;
}

// Cartan-Dieudonne on a subspace: cur_basis rows span the working subspace
// of V; gc = cur_basis G cur_basis^T; hc acts in subspace coordinates.
// Reflection vectors are emitted in V-coordinates.
bool decompose_rec(const QMat& gram_V, QMat cur_basis, QMat gc, QMat hc,
                   const Int& p, std::vector<IVec>& out) {
  const std::size_t m = gc.rows();
  if (m == 0) return true;
  // pivot: anisotropic vector of maximal |norm|_p among e_i and e_i + e_j
  QVec b(m, Rat(0));
  long bestv = kBigVal;
  for (std::size_t i = 0; i < m; ++i) {
    QVec cand(m, Rat(0));
    cand[i] = 1;
    Rat nn = dot(cand, gc, cand);
    long v = nn == 0 ? kBigVal : valuation(nn, p);
    if (v < bestv) {
      bestv = v;
      b = cand;
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      QVec cand(m, Rat(0));
      cand[i] = 1;
      cand[j] = 1;
      Rat nn = dot(cand, gc, cand);
      long v = nn == 0 ? kBigVal : valuation(nn, p);
      if (v < bestv) {
        bestv = v;
        b = cand;
      }
    }
  if (bestv >= kBigVal) return false;
  QVec img = mat_vec(hc.transposed(), b);  // row b * hc
  QVec v1(m), v2(m);
  for (std::size_t c = 0; c < m; ++c) {
    v1[c] = img[c] - b[c];
    v2[c] = img[c] + b[c];
  }
  Rat w1 = dot(v1, gc, v1);
  Rat w2 = dot(v2, gc, v2);
  long nu1 = w1 == 0 ? kBigVal : valuation(w1, p);
  long nu2 = w2 == 0 ? kBigVal : valuation(w2, p);
  bool img_matches = true;
  for (const auto& e : v1)
    if (e != 0) img_matches = false;
  if (!img_matches) {
    if (nu1 <= nu2) {
      if (nu1 >= kBigVal) return false;
      hc = hc * reflection(gc, v1);
      QVec xv(gram_V.rows(), Rat(0));
      for (std::size_t c = 0; c < gram_V.rows(); ++c)
        for (std::size_t i = 0; i < m; ++i) xv[c] += v1[i] * cur_basis(i, c);
      out.push_back(integerize_vec(xv));
    } else {
      if (nu2 >= kBigVal) return false;
      hc = hc * reflection(gc, v2);
      hc = hc * reflection(gc, b);
      QVec xv(gram_V.rows(), Rat(0));
      for (std::size_t c = 0; c < gram_V.rows(); ++c)
        for (std::size_t i = 0; i < m; ++i) xv[c] += v2[i] * cur_basis(i, c);
      out.push_back(integerize_vec(xv));
      QVec bv(gram_V.rows(), Rat(0));
      for (std::size_t c = 0; c < gram_V.rows(); ++c)
        for (std::size_t i = 0; i < m; ++i) bv[c] += b[i] * cur_basis(i, c);
      out.push_back(integerize_vec(bv));
    }
  }
  if (m == 1) return true;
  // restrict to b^perp: basis rows w_k = e_k - (b.e_k / b^2) b, k != pivot
  Rat b2 = dot(b, gc, b);
  std::size_t pivot = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (b[i] != 0) pivot = i;  // any coordinate carried by b
  QMat w(m - 1, m);
  std::size_t r = 0;
  for (std::size_t k = 0; k < m; ++k) {
    if (k == pivot) continue;
    QVec ek(m, Rat(0));
    ek[k] = 1;
    Rat coef = dot(ek, gc, b) / b2;
    for (std::size_t c = 0; c < m; ++c) w(r, c) = ek[c] - coef * b[c];
    ++r;
  }
  QMat new_basis = w * cur_basis;
  QMat new_g = w * gc * w.transposed();
  // restrict hc: express (w_k * hc) in {b, w_*} and drop the b-component
  QMat sys(m, m);  // rows: b, w_0..w_{m-2}; solve y = coeffs * sys
  for (std::size_t c = 0; c < m; ++c) sys(0, c) = b[c];
  for (std::size_t k = 0; k + 1 < m; ++k)
    for (std::size_t c = 0; c < m; ++c) sys(k + 1, c) = w(k, c);
  QMat sys_inv = inverse(sys);
  QMat new_h(m - 1, m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    QVec y = mat_vec(hc.transposed(), w.row(k));  // row w_k * hc
    // coeffs = y * sys^{-1}
    QVec coeffs = mat_vec(sys_inv.transposed(), y);
    for (std::size_t l = 0; l + 1 < m; ++l) new_h(k, l) = coeffs[l + 1];
  }
  return decompose_rec(gram_V, new_basis, new_g, new_h, p, out);
}

}  // namespace

std::optional<ReflectionChain> reflection_decomposition(const QMat& gram,
                                                        const QMat& f,
                                                        const Int& p, long t) {
  const std::size_t n = gram.rows();
  // collected so that f * S_{c1} * ... * S_{cm} ~ id; reflections are
  // involutions, hence f ~ S_{cm} * ... * S_{c1}.
  std::vector<IVec> collected;
  QMat hc = f;
  if (!decompose_rec(gram, QMat::identity(n), gram, hc, p, collected))
    return std::nullopt;
  std::vector<IVec> chain(collected.rbegin(), collected.rend());
  QMat prod = QMat::identity(n);
  for (const auto& x : chain) {
    QVec xq(n);
    for (std::size_t c = 0; c < n; ++c) xq[c] = Rat(x[c]);
    prod = prod * reflection(gram, xq);
  }
  if (matrix_valuation(f - prod, p) < t) return std::nullopt;
  ReflectionChain rc;
  rc.p = p;
  rc.precision = t;
  rc.vectors = chain;
  return rc;
}

QMat weak_approximation(const QMat& gram,
                        const std::vector<ApproximateIsometry>& targets) {
  const std::size_t n = gram.rows();
  if (targets.empty()) return QMat::identity(n);
  // per-prime reflection chains, with Hensel retries
  std::map<std::string, ReflectionChain> chains;
  std::size_t rmax = 0;
  for (const auto& tgt : targets) {
    const Int& p = tgt.p;
    long nu2 = p == 2 ? 1 : 0;
    QMat fp = tgt.matrix;
    {
      Rat dd = det(fp) - 1;
      long v = dd == 0 ? kBigVal : valuation(dd, p);
      if (v < 1 + 2 * nu2)
        throw std::invalid_argument(
            "weak_approximation: determinant condition violated");
    }
    long s = tgt.precision + (tgt.denominator == 1
                                  ? 0
                                  : valuation(Rat(tgt.denominator), p));
    std::optional<ReflectionChain> chain;
    for (int round = 0; round < 16; ++round) {
      chain = reflection_decomposition(gram, fp, p, tgt.precision);
      if (chain) break;
      s *= 2;
      fp = hensel_lift_isometry(gram, fp, p, s);
    }
    if (!chain)
      throw std::logic_error("weak_approximation: decomposition failed");
    chains.emplace(p.get_str(), *chain);
    rmax = std::max(rmax, chain->vectors.size());
  }
  if (rmax % 2 != 0) ++rmax;
  // common padding vector: first basis vector with nonzero norm
  IVec pad(n, Int(0));
  {
    bool found = false;
    for (std::size_t i = 0; i < n && !found; ++i) {
      pad.assign(n, Int(0));
      pad[i] = 1;
      if (gram(i, i) != 0) found = true;
    }
    if (!found) {
      // e_i + e_j with nonzero norm exists for nondegenerate forms
      for (std::size_t i = 0; i < n && !found; ++i)
        for (std::size_t j = i + 1; j < n && !found; ++j) {
          pad.assign(n, Int(0));
          pad[i] = 1;
          pad[j] = 1;
          IVec tmp = pad;
          QVec tq(n);
          for (std::size_t c = 0; c < n; ++c) tq[c] = Rat(tmp[c]);
          if (dot(tq, gram, tq) != 0) found = true;
        }
      if (!found)
        throw std::logic_error("weak_approximation: no anisotropic vector");
    }
  }
  for (auto& [key, chain] : chains) {
    if (chain.vectors.size() % 2 != 0)
      throw std::logic_error("weak_approximation: odd reflection count");
    while (chain.vectors.size() < rmax) chain.vectors.push_back(pad);
  }
  long l = 2 * static_cast<long>(n) + 10;
  for (int round = 0; round < 64; ++round) {
    // CRT the chain vectors coordinatewise at precision t_p + l
    std::vector<QVec> xs(rmax, QVec(n, Rat(0)));
    for (std::size_t i = 0; i < rmax; ++i) {
      std::vector<Int> mods;
      std::vector<std::vector<Int>> residues(n);
      for (const auto& tgt : targets) {
        const auto& chain = chains.at(tgt.p.get_str());
        Int mod = pow_int(tgt.p, tgt.precision + l);
        mods.push_back(mod);
        for (std::size_t c = 0; c < n; ++c)
          residues[c].push_back(fdiv_r(chain.vectors[i][c], mod));
      }
      IVec xi(n);
      Int m = 1;
      for (const auto& mm : mods) m *= mm;
      for (std::size_t c = 0; c < n; ++c) {
        Int r = crt(residues[c], mods);
        if (2 * r > m) r -= m;  // balanced representative
        xi[c] = r;
      }
      Int cont = content(xi);
      if (cont > 1)
        for (auto& e : xi) e = divexact(e, cont);
      for (std::size_t c = 0; c < n; ++c) xs[i][c] = Rat(xi[c]);
    }
    QMat f = QMat::identity(n);
    for (std::size_t i = 0; i < rmax; ++i) f = f * reflection(gram, xs[i]);
    bool good = true;
    for (const auto& tgt : targets) {
      long e = matrix_valuation(f - tgt.matrix, tgt.p);
      if (e < tgt.precision) {
        good = false;
        break;
      }
    }
    if (good) {
      if (!(f * gram * f.transposed() == gram))
        throw std::logic_error("weak_approximation: product not orthogonal");
      if (det(f) != 1)
        throw std::logic_error("weak_approximation: determinant not +1");
      return f;
    }
    l += 10;
  }
  throw std::logic_error("weak_approximation: iteration cap reached");
}

ErrorBound error_constants(const QMat& gram, const QVec& x, const QVec& h,
                           const Int& p) {
  auto vecnorm = [&](const QVec& v) -> Rat {
    long minv = kBigVal;
    for (const auto& e : v)
      if (e != 0) minv = std::min(minv, valuation(e, p));
    if (minv == kBigVal) return Rat(0);
    return minv >= 0 ? make_rat(1, pow_int(p, minv))
                     : Rat(pow_int(p, -minv));
  };
  auto matnorm = [&](const QMat& m) -> Rat {
    long minv = matrix_valuation(m, p);
    if (minv == kBigVal) return Rat(0);
    return minv >= 0 ? make_rat(1, pow_int(p, minv))
                     : Rat(pow_int(p, -minv));
  };
  auto absval = [&](const Rat& v) -> Rat {
    if (v == 0) return Rat(0);
    long nu = valuation(v, p);
    return nu >= 0 ? make_rat(1, pow_int(p, nu)) : Rat(pow_int(p, -nu));
  };
  Rat nx = vecnorm(x), nh = vecnorm(h);
  if (!(nh < nx))
    throw std::invalid_argument("error_constants: need ||h|| < ||x||");
  Rat x2 = dot(x, gram, x);
  if (x2 == 0) throw std::domain_error("error_constants: isotropic x");
  // the estimate replaces |(x+h)^2| by |x^2|; the perturbation must not
  // change the norm valuation
  QVec xh(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xh[i] = x[i] + h[i];
  Rat xh2 = dot(xh, gram, xh);
  if (xh2 == 0 || valuation(xh2, p) != valuation(x2, p))
    throw std::invalid_argument("error_constants: perturbation shifts |x^2|");
  QMat twog = gram;
  for (std::size_t i = 0; i < twog.rows(); ++i)
    for (std::size_t j = 0; j < twog.cols(); ++j) twog(i, j) *= 2;
  Rat n2g = matnorm(twog);
  Rat ng = matnorm(gram);
  Rat ax2 = absval(x2);
  Rat inner = ng / ax2;
  Rat mx = inner > Rat(1) ? inner : Rat(1);
  ErrorBound eb;
  eb.c = n2g / ax2 * nx * mx;
  QVec gx = mat_vec(gram, x);
  for (auto& e : gx) e *= 2;
  Rat n2gx = vecnorm(gx);
  Rat dd = n2gx / ax2;
  eb.d = dd > Rat(1) ? dd : Rat(1);
  return eb;
}

IVec norm_generator(const IntegerLattice& L, const Int& p) {
  const std::size_t n = L.rank();
  if (L.det() == 0) throw std::invalid_argument("norm_generator: degenerate");
  IVec best;
  long bestv = kBigVal;
  auto consider = [&](const IVec& v) {
    Int norm = dot(v, L.gram(), v);
    if (norm == 0) return;
    long nu = valuation(norm, p);
    if (nu < bestv) {
      bestv = nu;
      best = v;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    IVec v(n, Int(0));
    v[i] = 1;
    consider(v);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      IVec v(n, Int(0));
      v[i] = 1;
      v[j] = 1;
      consider(v);
    }
  if (best.empty()) throw std::logic_error("norm_generator: none found");
  return best;
}

namespace {

// canonical odd-p scale block: represent target units by the given diagonal
// units; returns C with C diag(us) C^T == diag(targets) mod p^prec.
QMat odd_match_units(const std::vector<Rat>& us, const std::vector<Rat>& targets,
                     const Int& p, long prec) {
  const std::size_t r = us.size();
  Int m = pow_int(p, prec);
  auto unit_of = [&](const Rat& x) -> Int {
    Int num = x.get_num(), den = x.get_den();
    Int un, ud;
    remove_p(num, p, un);
    remove_p(den, p, ud);
    return fdiv_r(fdiv_r(un, m) * mod_inverse(fdiv_r(ud, m), m), m);
  };
  std::vector<Int> u(r), t(r);
  for (std::size_t i = 0; i < r; ++i) {
    u[i] = unit_of(us[i]);
    t[i] = unit_of(targets[i]);
  }
  QMat c(r, r);
  std::vector<bool> done(r, false);
  for (std::size_t i = 0; i < r; ++i) {
    if (done[i]) continue;
    Int ratio = fdiv_r(t[i] * mod_inverse(u[i], m), m);
    if (legendre(fdiv_r(ratio, p), p) == 1) {
      Int sq = sqrt_mod_prime_power(ratio, p, prec);
      c(i, i) = Rat(sq);
      done[i] = true;
      continue;
    }
    // pair with another nonsquare-ratio index
    std::size_t jpair = r;
    for (std::size_t j = i + 1; j < r; ++j) {
      if (done[j]) continue;
      Int ratio2 = fdiv_r(t[j] * mod_inverse(u[j], m), m);
      if (legendre(fdiv_r(ratio2, p), p) == -1) {
        jpair = j;
        break;
      }
    }
    if (jpair == r)
      throw std::logic_error("odd_match_units: unpaired nonsquare ratio");
    // find (a, b): u_i a^2 + u_j b^2 == t_i mod p, then lift
    Int a0 = 0, b0 = 0;
    bool found = false;
    for (Int a = 0; a < p && !found; ++a) {
      Int rem = fdiv_r(t[i] - u[i] * a * a, p);
      // b^2 = rem / u_j mod p
      Int bb = fdiv_r(rem * mod_inverse(fdiv_r(u[jpair], p), p), p);
      if (bb == 0) {
        a0 = a;
        b0 = 0;
        found = true;
      } else if (legendre(bb, p) == 1) {
        a0 = a;
        b0 = sqrt_mod_prime_power(bb, p, 1);
        found = true;
      }
    }
    if (!found) throw std::logic_error("odd_match_units: no mod-p solution");
    // Newton-lift (a, b) to prec in the free coordinate
    Int a = a0, b = b0;
    {
      Int mod = p;
      while (mod < m) {
        Int next = mod * mod;
        if (next > m) next = m;
        Int F = fdiv_r(u[i] * a * a + u[jpair] * b * b - t[i], next);
        if (fdiv_r(a, p) != 0) {
          Int da = fdiv_r(F * mod_inverse(fdiv_r(2 * u[i] * a, next), next), next);
          a = fdiv_r(a - da, next);
        } else {
          Int db =
              fdiv_r(F * mod_inverse(fdiv_r(2 * u[jpair] * b, next), next), next);
          b = fdiv_r(b - db, next);
        }
        mod = next;
      }
    }
    // second row: lambda * (-u_j b, u_i a) with lambda^2 u_i u_j t_i == t_j
    Int denom = fdiv_r(u[i] * u[jpair] * t[i], m);
    Int lam2 = fdiv_r(t[jpair] * mod_inverse(denom, m), m);
    Int lam = sqrt_mod_prime_power(lam2, p, prec);
    c(i, i) = Rat(a);
    c(i, jpair) = Rat(b);
    c(jpair, i) = Rat(fdiv_r(-lam * u[jpair] * b, m));
    c(jpair, jpair) = Rat(fdiv_r(lam * u[i] * a, m));
    done[i] = done[jpair] = true;
  }
  return c;
}

struct ScaledBlocks {
  std::vector<long> scales;   // ascending, one per block
  std::vector<QMat> blocks;   // the raw blocks
  QMat basis;                 // rows: block basis in lattice coordinates
};

ScaledBlocks sorted_jordan(const IMat& g, const Int& p) {
  JordanSplit js = jordan_split(to_rat(g), p);
  // sort blocks by scale (stable), permuting the basis rows accordingly
  std::vector<std::size_t> order(js.blocks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return js.scales[a] < js.scales[b];
  });
  ScaledBlocks out;
  std::vector<std::size_t> offsets(js.blocks.size());
  std::size_t off = 0;
  for (std::size_t i = 0; i < js.blocks.size(); ++i) {
    offsets[i] = off;
    off += js.blocks[i].rows();
  }
  const std::size_t n = g.rows();
  out.basis = QMat(n, n);
  std::size_t row = 0;
  for (auto b : order) {
    out.scales.push_back(js.scales[b]);
    out.blocks.push_back(js.blocks[b]);
    for (std::size_t i = 0; i < js.blocks[b].rows(); ++i) {
      for (std::size_t c = 0; c < n; ++c)
        out.basis(row, c) = js.basis(offsets[b] + i, c);
      ++row;
    }
  }
  return out;
}

// max 2-adic valuation over nonzero entries (0 for unimodular blocks)
long matrix_span_2(const QMat& m) {
  long mx = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) mx = std::max(mx, valuation(m(i, j), Int(2)));
  return std::min(mx, 6L);
}

QMat assemble_block_diag(const std::vector<QMat>& blocks, std::size_t n) {
  QMat d(n, n);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) d(off + i, off + j) = b(i, j);
    off += b.rows();
  }
  return d;
}

// backtracking search for C (mod 2^K) with C d2 C^T == d1 mod 2^K.
std::optional<IMat> mod2k_isometry_search(const QMat& d1, const QMat& d2,
                                          long K) {
  const std::size_t n = d1.rows();
  Int mod = pow_int(2, K);
  // entries are 2-integral: denominators are odd, invert them mod 2^K
  IMat a(n, n), b(n, n);
  auto reduce = [&](const Rat& x) -> Int {
    Int num = fdiv_r(Int(x.get_num()), mod);
    Int den = fdiv_r(Int(x.get_den()), mod);
    return fdiv_r(num * mod_inverse(den, mod), mod);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (fdiv_r(Int(d1(i, j).get_den()), 2) == 0 ||
          fdiv_r(Int(d2(i, j).get_den()), 2) == 0)
        return std::nullopt;
      a(i, j) = reduce(d1(i, j));
      b(i, j) = reduce(d2(i, j));
    }
  IMat c(n, n);
  std::function<bool(std::size_t)> rec = [&](std::size_t row) -> bool {
    if (row == n) {
      // nonsingular mod 2 so that it lifts to an isometry
      IMat cm = c;
      Int dd = fdiv_r(det(cm), 2);
      return dd != 0;
    }
    // iterate candidate rows
    std::vector<Int> v(n, Int(0));
    std::function<bool(std::size_t)> build = [&](std::size_t col) -> bool {
      if (col == n) {
        // check congruences against rows 0..row
        for (std::size_t r2 = 0; r2 <= row; ++r2) {
          Int want = a(row, r2);
          Int got = 0;
          for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
              got += v[x] * b(x, y) * (r2 == row ? v[y] : c(r2, y));
          if (fdiv_r(got - want, mod) != 0) return false;
        }
        for (std::size_t x = 0; x < n; ++x) c(row, x) = v[x];
        return rec(row + 1);
      }
      for (Int t = 0; t < mod; ++t) {
        v[col] = t;
        if (build(col + 1)) return true;
      }
      return false;
    };
    return build(0);
  };
  if (!rec(0)) return std::nullopt;
  return c;
}

}  // namespace

QMat local_gram_isometry(const IMat& g1, const IMat& g2, const Int& p,
                         long prec) {
  const std::size_t n = g1.rows();
  ScaledBlocks j1 = sorted_jordan(g1, p);
  ScaledBlocks j2 = sorted_jordan(g2, p);
  if (j1.scales != j2.scales)
    throw std::domain_error("local_gram_isometry: scale mismatch");
  long work = prec + 6;
  QMat c(n, n);
  if (p != 2) {
    // blocks are 1x1; per scale, match units
    std::size_t pos = 0;
    std::size_t bi = 0;
    while (bi < j1.blocks.size()) {
      std::size_t bj = bi;
      while (bj < j1.blocks.size() && j1.scales[bj] == j1.scales[bi]) ++bj;
      std::vector<Rat> us, ts;
      Rat scale(pow_int(p, j1.scales[bi]));
      for (std::size_t k = bi; k < bj; ++k) {
        us.push_back(j2.blocks[k](0, 0) / scale);
        ts.push_back(j1.blocks[k](0, 0) / scale);
      }
      QMat cb = odd_match_units(us, ts, p, work);
      for (std::size_t i = 0; i < cb.rows(); ++i)
        for (std::size_t j = 0; j < cb.cols(); ++j)
          c(pos + i, pos + j) = cb(i, j);
      pos += cb.rows();
      bi = bj;
    }
  } else {
    // p = 2: seed per scale group (blocks rescaled to unit scale), Newton-lift
    // each group, and merge adjacent scale groups when a per-scale seed does
    // not exist (sign walking between scales).
    struct Group {
      long scale;         // minimal scale of the group
      long span = 0;      // max scale - min scale inside the group
      QMat s1, s2;        // rescaled by 2^{-scale}
      std::size_t pos;    // row offset
    };
    std::vector<Group> groups;
    {
      std::size_t bi2 = 0, pos = 0;
      while (bi2 < j1.blocks.size()) {
        std::size_t bj2 = bi2;
        while (bj2 < j1.blocks.size() && j1.scales[bj2] == j1.scales[bi2]) ++bj2;
        std::size_t dim = 0;
        for (std::size_t k = bi2; k < bj2; ++k) dim += j1.blocks[k].rows();
        Group g;
        g.scale = j1.scales[bi2];
        g.pos = pos;
        g.s1 = QMat(dim, dim);
        g.s2 = QMat(dim, dim);
        std::size_t o1 = 0;
        Rat f = make_rat(1, pow_int(2, g.scale));
        for (std::size_t k = bi2; k < bj2; ++k) {
          for (std::size_t i = 0; i < j1.blocks[k].rows(); ++i)
            for (std::size_t j = 0; j < j1.blocks[k].cols(); ++j) {
              g.s1(o1 + i, o1 + j) = j1.blocks[k](i, j) * f;
              g.s2(o1 + i, o1 + j) = j2.blocks[k](i, j) * f;
            }
          o1 += j1.blocks[k].rows();
        }
        groups.push_back(std::move(g));
        pos += dim;
        bi2 = bj2;
      }
    }
    // seed each group; when a per-scale seed does not exist (sign walking
    // between scales) merge with a neighbour and retry
    std::vector<IMat> seeds(groups.size());
    for (int pass = 0; pass < 16; ++pass) {
      bool all_ok = true;
      seeds.assign(groups.size(), IMat());
      for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        long K = 4 + 2 * groups[gi].span;
        auto s = mod2k_isometry_search(groups[gi].s1, groups[gi].s2, K);
        if (s) {
          seeds[gi] = *s;
          continue;
        }
        all_ok = false;
        std::size_t other = gi + 1 < groups.size() ? gi + 1 : gi - 1;
        if (other >= groups.size())
          throw std::domain_error("local_gram_isometry: no 2-adic seed");
        std::size_t a = std::min(gi, other), b = std::max(gi, other);
        Group merged;
        merged.scale = groups[a].scale;
        merged.pos = groups[a].pos;
        merged.span =
            groups[b].scale + groups[b].span - groups[a].scale;
        std::size_t da = groups[a].s1.rows(), db = groups[b].s1.rows();
        merged.s1 = QMat(da + db, da + db);
        merged.s2 = QMat(da + db, da + db);
        Rat fb(pow_int(2, groups[b].scale - groups[a].scale));
        for (std::size_t i = 0; i < da; ++i)
          for (std::size_t j = 0; j < da; ++j) {
            merged.s1(i, j) = groups[a].s1(i, j);
            merged.s2(i, j) = groups[a].s2(i, j);
          }
        for (std::size_t i = 0; i < db; ++i)
          for (std::size_t j = 0; j < db; ++j) {
            merged.s1(da + i, da + j) = groups[b].s1(i, j) * fb;
            merged.s2(da + i, da + j) = groups[b].s2(i, j) * fb;
          }
        groups.erase(groups.begin() + b);
        groups[a] = std::move(merged);
        break;
      }
      if (all_ok) break;
      if (pass == 15)
        throw std::domain_error("local_gram_isometry: no 2-adic seed");
    }
    // Newton-lift each group independently (conditioning stays bounded)
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      const auto& g = groups[gi];
      QMat f = to_rat(seeds[gi]);
      long d = matrix_valuation(g.s1 - f * g.s2 * f.transposed(), 2);
      for (int iter = 0; iter < 64 && d < work; ++iter) {
        QMat inv = inverse(g.s2 * f.transposed());
        QMat defect = g.s1 - f * g.s2 * f.transposed();
        QMat delta = defect * inv;
        for (std::size_t i = 0; i < delta.rows(); ++i)
          for (std::size_t j = 0; j < delta.cols(); ++j) delta(i, j) /= Rat(2);
        f = f + delta;
        long nd = matrix_valuation(g.s1 - f * g.s2 * f.transposed(), 2);
        if (nd <= d)
          throw std::logic_error("local_gram_isometry: lift stalled");
        d = nd;
      }
      for (std::size_t i = 0; i < f.rows(); ++i)
        for (std::size_t j = 0; j < f.cols(); ++j) c(g.pos + i, g.pos + j) = f(i, j);
    }
  }
  // S = B1^{-1} C B2 maps g1-coordinates to g2-coordinates
  QMat s = inverse(j1.basis) * c * j2.basis;
  return s;
}

PadicNormalForm padic_normal_form(const IntegerLattice& L, const Int& p,
                                  long prec) {
  if (L.det() == 0)
    throw std::invalid_argument("padic_normal_form: degenerate");
  ScaledBlocks sj = sorted_jordan(L.gram(), p);
  const std::size_t n = L.rank();
  QMat basis = sj.basis;
  QMat nf = assemble_block_diag(sj.blocks, n);
  if (p != 2) {
    // canonicalize each scale block to diag(1, .., 1, eps)
    std::size_t pos = 0, bi = 0;
    QMat c = QMat::identity(n);
    while (bi < sj.blocks.size()) {
      std::size_t bj = bi;
      while (bj < sj.blocks.size() && sj.scales[bj] == sj.scales[bi]) ++bj;
      Rat scale(pow_int(p, sj.scales[bi]));
      std::vector<Rat> us, ts;
      Int prod = 1;
      Int m = pow_int(p, prec + 2);
      for (std::size_t k = bi; k < bj; ++k) {
        Rat u = sj.blocks[k](0, 0) / scale;
        us.push_back(u);
        Int num = u.get_num(), den = u.get_den();
        Int un, ud;
        remove_p(num, p, un);
        remove_p(den, p, ud);
        prod = fdiv_r(prod * un * mod_inverse(fdiv_r(ud, m), m), m);
      }
      // target: all 1 except possibly the last entry a fixed nonresidue
      Int nonres = 2;
      while (legendre(nonres, p) != -1) ++nonres;
      bool square = legendre(fdiv_r(prod, p), p) == 1;
      for (std::size_t k = bi; k < bj; ++k) ts.push_back(Rat(1));
      if (!square) ts.back() = Rat(nonres);
      QMat cb = odd_match_units(us, ts, p, prec + 2);
      for (std::size_t i = 0; i < cb.rows(); ++i)
        for (std::size_t j = 0; j < cb.cols(); ++j)
          c(pos + i, pos + j) = cb(i, j);
      pos += cb.rows();
      bi = bj;
    }
    basis = c * basis;
    nf = c * nf * c.transposed();
  }
  return {basis, nf};
}

}  // namespace hyperlat
