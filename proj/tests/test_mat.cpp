#include <random>

#include "doctest.h"
#include "hyperlat/mat.hpp"

using namespace hyperlat;

namespace {

IMat random_mat(std::mt19937_64& rng, std::size_t m, std::size_t n, int lo,
                int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  IMat a(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = d(rng);
  return a;
}

Int det_by_expansion(const IMat& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  if (n == 1) return m(0, 0);
  Int s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    IMat minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t cc = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(i - 1, cc++) = m(i, c);
      }
    }
    Int t = m(0, j) * det_by_expansion(minor);
    s += (j % 2 == 0) ? t : -t;
  }
  return s;
}

}  // namespace

TEST_CASE("bareiss determinant matches cofactor expansion") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 200; ++it) {
    std::size_t n = 1 + it % 5;
    IMat a = random_mat(rng, n, n, -9, 9);
    CHECK(det(a) == det_by_expansion(a));
  }
}

TEST_CASE("hnf is a unimodular row transform with echelon shape") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 100; ++it) {
    std::size_t m = 1 + it % 4, n = 1 + (it * 7) % 5;
    IMat a = random_mat(rng, m, n, -6, 6);
    IMat u;
    IMat h = hnf(a, &u);
    CHECK(u * a == h);
    Int du = det(u);
    CHECK((du == 1 || du == -1));
    // echelon: pivot columns strictly increase
    long last = -1;
    for (std::size_t i = 0; i < m; ++i) {
      long piv = -1;
      for (std::size_t j = 0; j < n; ++j)
        if (h(i, j) != 0) {
          piv = static_cast<long>(j);
          break;
        }
      if (piv >= 0) {
        CHECK(piv > last);
        CHECK(h(i, piv) > 0);
        last = piv;
      }
    }
  }
}

TEST_CASE("left_kernel rows annihilate and have full complement rank") {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 100; ++it) {
    std::size_t m = 2 + it % 4, n = 1 + it % 3;
    IMat a = random_mat(rng, m, n, -4, 4);
    IMat k = left_kernel(a);
    IMat prod = k * a;
    CHECK(prod.is_zero());
    CHECK(k.rows() + rank_of(a) == m);
  }
}

TEST_CASE("snf diagonal with divisibility and unimodular transforms") {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 100; ++it) {
    std::size_t m = 1 + it % 4, n = 1 + (it * 3) % 4;
    IMat a = random_mat(rng, m, n, -8, 8);
    IMat u, v;
    IMat s = snf(a, &u, &v);
    CHECK(u * a * v == s);
    CHECK(abs(det(u)) == 1);
    CHECK(abs(det(v)) == 1);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) CHECK(s(i, j) == 0);
    for (std::size_t i = 0; i + 1 < std::min(m, n); ++i) {
      if (s(i + 1, i + 1) != 0) {
        CHECK(s(i, i) >= 0);
        if (s(i, i) != 0) CHECK(divides(s(i, i), s(i + 1, i + 1)));
      }
    }
  }
}

TEST_CASE("charpoly on a known matrix") {
  IMat a{{2, 1}, {1, 2}};
  auto c = charpoly(a);  // x^2 - 4x + 3
  REQUIRE(c.size() == 3);
  CHECK(c[2] == 1);
  CHECK(c[1] == -4);
  CHECK(c[0] == 3);
}

TEST_CASE("complete_to_unimodular") {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 50; ++it) {
    std::size_t n = 2 + it % 4;
    IVec v(n);
    std::uniform_int_distribution<int> d(-9, 9);
    do {
      for (auto& x : v) x = d(rng);
    } while (content(v) != 1);
    IMat u = complete_to_unimodular(v);
    for (std::size_t j = 0; j < n; ++j) CHECK(u(0, j) == v[j]);
    CHECK(abs(det(u)) == 1);
  }
}

TEST_CASE("lattice intersection and index") {
  // 2Z^2 inside Z^2
  QMat a = QMat::identity(2);
  QMat b{{Rat(2), Rat(0)}, {Rat(0), Rat(2)}};
  QMat c = lattice_intersection(a, b);
  CHECK(abs(det(to_int(c))) == 4);
  CHECK(lattice_index(a, b) == 4);

  // intersection of Z^2 with (1/2)Z x Z is Z^2
  QMat dm{{Rat(1, 2), Rat(0)}, {Rat(0), Rat(1)}};
  QMat e = lattice_intersection(a, dm);
  CHECK(abs(det(e)) == 1);
}

TEST_CASE("hilbert symbols: bilinearity and known values") {
  // (2,3)_3: 3 | b case
  CHECK(hilbert_symbol(Rat(2), Rat(3), Int(3)) == legendre(2, 3));
  CHECK(hilbert_symbol(Rat(-1), Rat(-1), Int(2)) == -1);
  CHECK(hilbert_symbol(Rat(-1), Rat(-1), Int(0)) == -1);
  CHECK(hilbert_symbol(Rat(5), Rat(7), Int(11)) == 1);
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> d(-30, 30);
  std::vector<Int> ps{2, 3, 5, 7};
  for (int it = 0; it < 300; ++it) {
    Int a = d(rng), b = d(rng), c = d(rng);
    if (a == 0 || b == 0 || c == 0) continue;
    for (const auto& p : ps) {
      // multiplicativity in the first argument
      CHECK(hilbert_symbol(Rat(a * b), Rat(c), p) ==
            hilbert_symbol(Rat(a), Rat(c), p) * hilbert_symbol(Rat(b), Rat(c), p));
      // symmetry
      CHECK(hilbert_symbol(Rat(a), Rat(b), p) == hilbert_symbol(Rat(b), Rat(a), p));
    }
  }
}

TEST_CASE("hilbert reciprocity: product over all places is 1") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> d(-50, 50);
  for (int it = 0; it < 200; ++it) {
    Int a = d(rng), b = d(rng);
    if (a == 0 || b == 0) continue;
    int prod = hilbert_symbol(Rat(a), Rat(b), Int(0));
    for (const auto& p : prime_divisors(2 * a * b))
      prod *= hilbert_symbol(Rat(a), Rat(b), p);
    CHECK(prod == 1);
  }
}

TEST_CASE("sqrt_mod_prime_power") {
  CHECK(fdiv_r(sqrt_mod_prime_power(2, 7, 4) * sqrt_mod_prime_power(2, 7, 4) - 2,
               pow_int(7, 4)) == 0);
  CHECK(fdiv_r(sqrt_mod_prime_power(17, 2, 10) * sqrt_mod_prime_power(17, 2, 10) - 17,
               pow_int(2, 10)) == 0);
}

TEST_CASE("crt") {
  Int x = crt({Int(2), Int(3)}, {Int(5), Int(7)});
  CHECK(fdiv_r(x, 5) == 2);
  CHECK(fdiv_r(x, 7) == 3);
}
