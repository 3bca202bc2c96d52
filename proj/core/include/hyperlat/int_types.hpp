#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace hyperlat {

// All arithmetic in the library is exact. Int/Rat are the only scalar types
// that ever touch a Gram matrix.
using Int = mpz_class;
using Rat = mpq_class;

// mpq_class(num, den) does not canonicalize; always build fractions here.
inline Rat make_rat(const Int& num, const Int& den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Int gcd(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int lcm(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// g = gcd(a,b) together with u,v such that u*a + v*b = g.
inline Int gcdext(const Int& a, const Int& b, Int& u, Int& v) {
  Int g;
  mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), a.get_mpz_t(),
             b.get_mpz_t());
  return g;
}

inline Int abs(const Int& a) {
  Int r;
  mpz_abs(r.get_mpz_t(), a.get_mpz_t());
  return r;
}

// Floor division and the matching non-negative remainder.
inline Int fdiv_q(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Int fdiv_r(const Int& a, const Int& b) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int divexact(const Int& a, const Int& b) {
  Int q;
  mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline bool divides(const Int& d, const Int& a) {
  return mpz_divisible_p(a.get_mpz_t(), d.get_mpz_t()) != 0;
}

inline bool is_perfect_square(const Int& a) {
  return a >= 0 && mpz_perfect_square_p(a.get_mpz_t()) != 0;
}

inline Int isqrt(const Int& a) {
  if (a < 0) throw std::domain_error("isqrt of negative integer");
  Int r;
  mpz_sqrt(r.get_mpz_t(), a.get_mpz_t());
  return r;
}

inline bool is_probable_prime(const Int& p) {
  return mpz_probab_prime_p(p.get_mpz_t(), 32) != 0;
}

inline Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Int mod_inverse(const Int& a, const Int& m) {
  Int r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::domain_error("mod_inverse: not invertible");
  return r;
}

// Legendre symbol (a/p), p an odd prime.
inline int legendre(const Int& a, const Int& p) {
  return mpz_legendre(a.get_mpz_t(), p.get_mpz_t());
}

inline int kronecker(const Int& a, const Int& b) {
  return mpz_kronecker(a.get_mpz_t(), b.get_mpz_t());
}

// nu_p(a) for a != 0; throws on a == 0.
inline long valuation(const Int& a, const Int& p) {
  if (a == 0) throw std::domain_error("valuation of zero");
  Int rest;
  return static_cast<long>(
      mpz_remove(rest.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t()));
}

// a = p^v * u with p not dividing u; returns v and sets unit = u.
inline long remove_p(const Int& a, const Int& p, Int& unit) {
  if (a == 0) throw std::domain_error("remove_p of zero");
  return static_cast<long>(
      mpz_remove(unit.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t()));
}

inline long valuation(const Rat& a, const Int& p) {
  if (a == 0) throw std::domain_error("valuation of zero");
  return valuation(Int(a.get_num()), p) - valuation(Int(a.get_den()), p);
}

// Trial division; inputs in this project stay far below 64-bit sizes, but we
// fall back to probable-prime certification for any large cofactor.
std::map<Int, long> factor(Int n);

std::vector<Int> prime_divisors(const Int& n);

// All positive divisors, ascending.
std::vector<Int> divisors(const Int& n);

// Hilbert symbol (a,b)_p over Q_p (p prime), or over R for p = 0.
int hilbert_symbol(Rat a, Rat b, const Int& p);

// Square-class test in Q_p* (p prime) or R (p = 0).
bool is_padic_square(const Rat& a, const Int& p);

// sqrt of a p-adic unit square mod p^prec (unit must be a square mod p^prec).
Int sqrt_mod_prime_power(const Int& a, const Int& p, long prec);

// x with x == r[i] mod m[i]; moduli must be pairwise coprime.
Int crt(const std::vector<Int>& r, const std::vector<Int>& m);

}  // namespace hyperlat
