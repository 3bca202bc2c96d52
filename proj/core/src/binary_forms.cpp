#include "hyperlat/binary_forms.hpp"

#include <algorithm>
#include <set>

namespace hyperlat {

namespace {

bool is_reduced_indef(const BinQF& f) {
  Int D = f.disc();
  if (f.b <= 0) return false;
  if (f.b * f.b >= D) return false;
  Int twoa = 2 * abs(f.a);
  // sqrt(D) - b < 2|a| < sqrt(D) + b, exactly
  if (D >= (twoa + f.b) * (twoa + f.b)) return false;          // sqrt(D) >= 2|a| + b
  if (twoa > f.b && (twoa - f.b) * (twoa - f.b) >= D) return false;
  return true;
}

// rho step for indefinite forms of positive nonsquare discriminant.
BinQF rho(const BinQF& f) {
  Int D = f.disc();
  Int s = isqrt(D);
  Int ac = abs(f.c);
  // b' = -b mod 2|c| in the standard window
  Int twoc = 2 * ac;
  Int b1 = fdiv_r(-f.b, twoc);
  Int upper = ac > s ? ac : s;
  // shift b1 into (upper - 2|c|, upper]
  b1 += twoc * fdiv_q(upper - b1, twoc);
  if (b1 > upper) b1 -= twoc;
  Int c1 = divexact(b1 * b1 - D, 4 * f.c);
  return BinQF{f.c, b1, c1};
}

BinQF reduce_indef(BinQF f) {
  for (int i = 0; i < 10000; ++i) {
    if (is_reduced_indef(f)) return f;
    f = rho(f);
  }
  throw std::logic_error("reduce_indef: did not terminate");
}

// Canonical proper-class data for square discriminant: every such form is
// properly equivalent to (0, s, c) with 0 <= c < s.
Int square_disc_canonical_c(const BinQF& f) {
  Int D = f.disc();
  Int s = isqrt(D);
  if (s == 0) throw std::domain_error("square_disc_canonical_c: D == 0");
  if (s * s != D) throw std::domain_error("square_disc_canonical_c: D not square");
  // Isotropic primitive vectors: from the factorization of 4a f =
  // (2ax + (b-s)y)(2ax + (b+s)y), or directly when a == 0.
  std::vector<IVec> lines;
  if (f.a == 0) {
    lines.push_back({Int(1), Int(0)});
    // second line: b x + c y = 0
    Int g = gcd(f.b, f.c);
    lines.push_back({divexact(-f.c, g), divexact(f.b, g)});
  } else {
    for (const Int& sgn : {Int(s), Int(-s)}) {
      // 2a x + (b - sgn) y = 0
      Int u = 2 * f.a, w = f.b - sgn;
      Int g = gcd(u, w);
      lines.push_back({divexact(-w, g), divexact(u, g)});
    }
  }
  std::optional<Int> best;
  for (auto v : lines) {
    for (int flip = 0; flip < 2; ++flip) {
      if (flip) {
        v[0] = -v[0];
        v[1] = -v[1];
      }
      // complete (v0, v1) to an SL2 matrix with first column v
      Int p, q;
      Int g = gcdext(v[0], v[1], p, q);
      if (g != 1) continue;
      // T = [[v0, -q],[v1, p]] has det v0*p + v1*q = 1
      Int x2 = -q, y2 = p;
      Int bprime =
          2 * f.a * v[0] * x2 + f.b * (v[0] * y2 + v[1] * x2) + 2 * f.c * v[1] * y2;
      if (bprime != s) continue;
      Int cprime = f.eval(x2, y2);
      Int c0 = fdiv_r(cprime, s);
      if (!best || c0 < *best) best = c0;
    }
  }
  if (!best) throw std::logic_error("square_disc_canonical_c: no canonical rep");
  return *best;
}

}  // namespace

BinQF form_of(const IntegerLattice& M) {
  if (M.rank() != 2) throw std::invalid_argument("form_of: rank != 2");
  return BinQF{M.gram()(0, 0), 2 * M.gram()(0, 1), M.gram()(1, 1)};
}

std::vector<BinQF> reduction_cycle(const BinQF& f) {
  Int D = f.disc();
  if (D <= 0 || is_perfect_square(D))
    throw std::domain_error("reduction_cycle: need positive nonsquare disc");
  BinQF r0 = reduce_indef(f);
  std::vector<BinQF> cycle{r0};
  BinQF g = rho(r0);
  int guard = 0;
  while (!(g == r0)) {
    cycle.push_back(g);
    g = rho(g);
    if (++guard > 100000) throw std::logic_error("reduction_cycle: runaway");
  }
  return cycle;
}

bool properly_equivalent(const BinQF& f, const BinQF& g) {
  if (f.disc() != g.disc()) return false;
  Int D = f.disc();
  if (D == 0) throw std::domain_error("properly_equivalent: degenerate");
  if (D < 0) {
    // definite; normalize to positive definite
    auto reduce_def = [](BinQF h) {
      if (h.a < 0) h = BinQF{-h.a, -h.b, -h.c};  // track sign separately
      for (int i = 0; i < 10000; ++i) {
        // translate: b into (-a, a]
        Int t = fdiv_q(h.a - h.b, 2 * h.a);
        if (t != 0) {
          // (x, y) -> (x + t y, y): b' = b + 2at, c' = c + bt + at^2
          h.c += h.b * t + h.a * t * t;
          h.b += 2 * h.a * t;
        }
        if (h.a > h.c) {
          h = BinQF{h.c, -h.b, h.a};
          continue;
        }
        if (h.a == h.c && h.b < 0) h.b = -h.b;
        if (h.b == -h.a) h.b = h.a;
        break;
      }
      return h;
    };
    bool fneg = f.a < 0, gneg = g.a < 0;
    if (fneg != gneg) return false;
    BinQF fr = reduce_def(fneg ? BinQF{-f.a, -f.b, -f.c} : f);
    BinQF gr = reduce_def(gneg ? BinQF{-g.a, -g.b, -g.c} : g);
    return fr == gr;
  }
  if (is_perfect_square(D))
    return square_disc_canonical_c(f) == square_disc_canonical_c(g);
  BinQF gr = reduce_indef(g);
  for (const auto& h : reduction_cycle(f))
    if (h == gr) return true;
  return false;
}

bool equivalent(const BinQF& f, const BinQF& g) {
  if (properly_equivalent(f, g)) return true;
  // improper: conjugate g by diag(1, -1)
  return properly_equivalent(f, BinQF{g.a, -g.b, g.c});
}

bool represents(const BinQF& f, const Int& t) {
  Int D = f.disc();
  if (D == 0) throw std::domain_error("represents: degenerate form");
  if (t == 0) return D > 0 && is_perfect_square(D);
  if (D < 0) {
    // definite: sign screen, then bounded enumeration
    bool pos = f.a > 0;
    if (pos && t < 0) return false;
    if (!pos && t > 0) return false;
    BinQF h = pos ? f : BinQF{-f.a, -f.b, -f.c};
    Int u = pos ? t : -t;
    // y^2 <= 4 a u / |D|
    Int ybound = isqrt((4 * h.a * u) / (-D)) + 1;
    for (Int y = -ybound; y <= ybound; ++y) {
      // a x^2 + (b y) x + (c y^2 - u) = 0
      Int A = h.a, B = h.b * y, C = h.c * y * y - u;
      Int disc = B * B - 4 * A * C;
      if (disc < 0 || !is_perfect_square(disc)) continue;
      Int s = isqrt(disc);
      if (divides(2 * A, -B + s) || divides(2 * A, -B - s)) return true;
    }
    return false;
  }
  if (is_perfect_square(D)) {
    // isotropic: factor into linear forms and enumerate divisors
    Int s = isqrt(D);
    if (f.a == 0) {
      // y (b x + c y) = t
      for (const Int& y : divisors(abs(t))) {
        for (const Int& ys : {Int(y), Int(-y)}) {
          Int rest = divexact(t, ys) - f.c * ys;
          if (f.b != 0 && divides(f.b, rest)) return true;
        }
      }
      return false;
    }
    // (2a x + (b-s) y)(2a x + (b+s) y) = 4 a t
    Int N = 4 * f.a * t;
    for (const Int& u : divisors(abs(N))) {
      for (const Int& us : {Int(u), Int(-u)}) {
        Int v = divexact(N, us);
        // v - u = 2 s y
        if (s == 0) continue;
        if (!divides(2 * s, v - us)) continue;
        Int y = divexact(v - us, 2 * s);
        Int num = us - (f.b - s) * y;
        if (divides(2 * f.a, num)) return true;
      }
    }
    return false;
  }
  // indefinite anisotropic: primitive tests over square divisors
  for (const Int& d : divisors(abs(t))) {
    if (!divides(d * d, t)) continue;
    Int tp = divexact(t, d * d);
    Int m = 4 * abs(tp);
    for (Int b = 0; b < m; ++b) {
      if (fdiv_r(b * b - D, m) != 0) continue;
      Int c = divexact(b * b - D, 4 * tp);
      if (properly_equivalent(f, BinQF{tp, b, c})) return true;
    }
  }
  return false;
}

std::optional<IVec> binary_isotropic_vector(const BinQF& f) {
  Int D = f.disc();
  if (D <= 0 || !is_perfect_square(D)) return std::nullopt;
  Int s = isqrt(D);
  IVec v(2);
  if (f.a == 0) {
    v[0] = 1;
    v[1] = 0;
    return v;
  }
  // x = -(b - s), y = 2a is a root of a x^2 + b x y + c y^2
  v[0] = -(f.b - s);
  v[1] = 2 * f.a;
  Int g = gcd(v[0], v[1]);
  v[0] = divexact(v[0], g);
  v[1] = divexact(v[1], g);
  if (f.eval(v[0], v[1]) != 0)
    throw std::logic_error("binary_isotropic_vector: bad construction");
  return v;
}

std::vector<IntegerLattice> even_binary_classes(const Int& target_det) {
  std::vector<IntegerLattice> out;
  if (target_det == 0)
    throw std::domain_error("even_binary_classes: degenerate");
  if (target_det > 0) {
    // negative definite convention; enumerate positive definite reduced even
    // forms of determinant target_det and negate.
    // Gram [[A, B/2],[B/2, C]] with A,B,C even, reduced: 0 <= B <= A <= C.
    for (Int A = 2; A * A <= 4 * target_det / 3 + 4; A += 2) {
      for (Int B = 0; B <= A; B += 2) {
        Int num = B * B / 4 + target_det;  // A*C = B^2/4 + det
        if (!divides(A, num)) continue;
        Int C = divexact(num, A);
        if (fdiv_r(C, 2) != 0 || C < A) continue;
        IMat g(2, 2);
        g(0, 0) = -A;
        g(0, 1) = -B / 2;
        g(1, 0) = -B / 2;
        g(1, 1) = -C;
        out.emplace_back(g);
      }
    }
    return out;
  }
  // indefinite: det < 0
  Int m = -target_det;
  if (is_perfect_square(m)) {
    // every even isotropic binary of det -n^2 is some U(n,k)
    Int n = isqrt(m);
    std::vector<BinQF> reps;
    for (Int k = 0; k < n; ++k) {
      IntegerLattice cand = lattice_U(n, k);
      BinQF f = form_of(cand);
      bool known = false;
      for (const auto& r : reps)
        if (equivalent(r, f)) {
          known = true;
          break;
        }
      if (!known) {
        reps.push_back(f);
        out.push_back(cand);
      }
    }
    return out;
  }
  Int Dp = 4 * m;  // classical discriminant
  Int s = isqrt(Dp);
  std::vector<BinQF> reps;
  for (Int B = 2; B <= s; B += 2) {
    Int prod = divexact(B * B - Dp, 4);  // = A*C / 4 * 4... A*C = (B^2 - Dp)/4
    // enumerate even A with A | prod/?: A*C = (B^2-Dp)/4 < 0
    Int target = prod;  // A*C = target (negative)
    for (Int A = 2; A * A <= abs(target) + 1; A += 2) {
      for (const Int& As : {Int(A), Int(-A)}) {
        if (!divides(As, target)) continue;
        Int C = divexact(target, As);
        if (fdiv_r(C, 2) != 0) continue;
        BinQF f{As, B, C};
        if (!is_reduced_indef(f)) continue;
        bool known = false;
        for (const auto& r : reps)
          if (equivalent(r, f)) {
            known = true;
            break;
          }
        if (!known) reps.push_back(f);
      }
      // also |C| < |A| cases arise from the loop over the partner divisor
      for (const Int& Cs : {Int(A), Int(-A)}) {
        if (!divides(Cs, target)) continue;
        Int As2 = divexact(target, Cs);
        if (fdiv_r(As2, 2) != 0) continue;
        BinQF f{As2, B, Cs};
        if (!is_reduced_indef(f)) continue;
        bool known = false;
        for (const auto& r : reps)
          if (equivalent(r, f)) {
            known = true;
            break;
          }
        if (!known) reps.push_back(f);
      }
    }
  }
  for (const auto& r : reps) {
    IMat g(2, 2);
    g(0, 0) = r.a;
    g(0, 1) = divexact(r.b, 2);
    g(1, 0) = g(0, 1);
    g(1, 1) = r.c;
    out.emplace_back(g);
  }
  return out;
}

}  // namespace hyperlat
