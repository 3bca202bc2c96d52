#include "hyperlat/int_types.hpp"

#include <algorithm>

namespace hyperlat {

std::map<Int, long> factor(Int n) {
  std::map<Int, long> f;
  if (n < 0) n = -n;
  if (n <= 1) return f;
  for (Int p = 2; p * p <= n;) {
    if (divides(p, n)) {
      long e = 0;
      while (divides(p, n)) {
        n = divexact(n, p);
        ++e;
      }
      f[p] = e;
    }
    p += (p == 2) ? 1 : 2;
    if (p > 100000 && n > 1) break;
  }
  if (n > 1) {
    if (!is_probable_prime(n))
      throw std::domain_error("factor: cofactor too large: " + n.get_str());
    f[n] += 1;
  }
  return f;
}

std::vector<Int> prime_divisors(const Int& n) {
  std::vector<Int> ps;
  for (const auto& [p, e] : factor(n)) ps.push_back(p);
  return ps;
}

std::vector<Int> divisors(const Int& n) {
  std::vector<Int> ds{1};
  for (const auto& [p, e] : factor(n)) {
    std::size_t m = ds.size();
    Int pk = 1;
    for (long k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < m; ++i) ds.push_back(ds[i] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

namespace {

// (a,b)_p for nonzero integers with p odd prime, a,b coprime to p after
// removing powers of p.
int hilbert_odd(const Int& a, const Int& b, const Int& p) {
  Int ua, ub;
  long va = remove_p(a, p, ua);
  long vb = remove_p(b, p, ub);
  int eps = ((p - 1) / 2) % 2 == 0 ? 1 : -1;  // (-1/p)
  int r = 1;
  if (va % 2 != 0 && vb % 2 != 0) r *= eps;
  if (vb % 2 != 0) r *= legendre(ua, p);
  if (va % 2 != 0) r *= legendre(ub, p);
  return r;
}

// (a,b)_2 = (-1)^{e(ua)e(ub) + va*w(ub) + vb*w(ua)} with e(u) = (u-1)/2,
// w(u) = (u^2-1)/8 taken mod 2.
int hilbert_two(const Int& a, const Int& b) {
  Int ua, ub;
  long va = remove_p(a, 2, ua);
  long vb = remove_p(b, 2, ub);
  auto omega = [](const Int& u) {
    Int m = fdiv_r(u, 8);
    return (m == 1 || m == 7) ? 0 : 1;
  };
  auto e4 = [](const Int& u) { return fdiv_r(u - 1, 4) == 0 ? 0 : 1; };
  int exp = e4(ua) * e4(ub) + static_cast<int>(va % 2 != 0) * omega(ub) +
            static_cast<int>(vb % 2 != 0) * omega(ua);
  return exp % 2 == 0 ? 1 : -1;
}

}  // namespace

int hilbert_symbol(Rat a, Rat b, const Int& p) {
  if (a == 0 || b == 0) throw std::domain_error("hilbert_symbol: zero");
  // Square classes only: clear denominators.
  Int ia = a.get_num() * a.get_den();
  Int ib = b.get_num() * b.get_den();
  if (p == 0) return (ia < 0 && ib < 0) ? -1 : 1;
  if (p == 2) return hilbert_two(ia, ib);
  return hilbert_odd(ia, ib, p);
}

bool is_padic_square(const Rat& a, const Int& p) {
  if (a == 0) throw std::domain_error("is_padic_square: zero");
  if (p == 0) return a > 0;
  Int n = a.get_num() * a.get_den();
  Int u;
  long v = remove_p(n, p, u);
  if (v % 2 != 0) return false;
  if (p == 2) return fdiv_r(u, 8) == 1;
  return legendre(u, p) == 1;
}

Int sqrt_mod_prime_power(const Int& a, const Int& p, long prec) {
  Int m = pow_int(p, prec);
  Int u = fdiv_r(a, m);
  if (!is_padic_square(Rat(u), p))
    throw std::domain_error("sqrt_mod_prime_power: not a square");
  Int x;
  if (p == 2) {
    x = 1;  // u == 1 mod 8; lift x^2 = u from mod 8 upward
    Int mod = 8;
    long k = 3;
    while (k < prec) {
      // x' = x + t*2^{k-1}: (x')^2 = x^2 + t*2^k mod 2^{k+1}
      Int next = mod * 2;
      if (fdiv_r(x * x - u, next) != 0) x += divexact(mod, 2);
      mod = next;
      ++k;
    }
    x = fdiv_r(x, m);
  } else {
    // Tonelli-Shanks mod p, then Hensel.
    Int up = fdiv_r(u, p);
    Int r = 0;
    // p in this project is small; a scan is fine.
    for (Int t = 1; t < p; ++t)
      if (fdiv_r(t * t - up, p) == 0) {
        r = t;
        break;
      }
    if (r == 0) throw std::domain_error("sqrt_mod_prime_power: no root mod p");
    Int mod = p;
    x = r;
    while (mod < m) {
      Int next = mod * mod;
      if (next > m) next = m;
      // Newton: x <- (x + u/x)/2 mod next
      Int inv2x = mod_inverse(fdiv_r(2 * x, next), next);
      x = fdiv_r((x * x + u) * inv2x, next);
      mod = next;
    }
    x = fdiv_r(x, m);
  }
  if (fdiv_r(x * x - u, m) != 0)
    throw std::logic_error("sqrt_mod_prime_power: lift failed");
  return x;
}

Int crt(const std::vector<Int>& r, const std::vector<Int>& m) {
  Int x = 0, mod = 1;
  for (std::size_t i = 0; i < r.size(); ++i) {
    Int u, v;
    Int g = gcdext(mod, m[i], u, v);
    if (g != 1) throw std::domain_error("crt: moduli not coprime");
    Int nm = mod * m[i];
    x = fdiv_r(x * v * m[i] + r[i] * u * mod, nm);
    mod = nm;
  }
  return x;
}

}  // namespace hyperlat
