#include <functional>
#include <random>

#include "doctest.h"
#include "hyperlat/genus.hpp"
#include "hyperlat/padic.hpp"

using namespace hyperlat;

namespace {

QMat random_reflection_product(std::mt19937_64& rng, const QMat& gram,
                               int count) {
  const std::size_t n = gram.rows();
  std::uniform_int_distribution<int> d(-4, 4);
  QMat f = QMat::identity(n);
  int used = 0;
  while (used < count) {
    QVec x(n);
    for (auto& e : x) e = d(rng);
    if (dot(x, gram, x) == 0) continue;
    f = f * reflection(gram, x);
    ++used;
  }
  return f;
}

IMat random_even_gram(std::mt19937_64& rng, std::size_t n, int bound) {
  std::uniform_int_distribution<int> d(-bound, bound);
  for (;;) {
    IMat g(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        int x = d(rng);
        if (i == j) x *= 2;
        g(i, j) = x;
        g(j, i) = x;
      }
    if (det(g) != 0) return g;
  }
}

}  // namespace

TEST_CASE("reflection: swap on the hyperbolic plane, involution, det -1") {
  QMat gu = to_rat(lattice_U().gram());
  QVec x{Rat(1), Rat(-1)};
  QMat s = reflection(gu, x);
  QVec e1{Rat(1), Rat(0)};
  QVec img = mat_vec(s.transposed(), e1);  // row e1 * s
  CHECK(img[0] == 0);
  CHECK(img[1] == 1);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(-5, 5);
  int done = 0;
  while (done < 100) {
    std::size_t n = 2 + done % 3;
    IMat g = random_even_gram(rng, n, 3);
    QMat gq = to_rat(g);
    QVec v(n);
    for (auto& e : v) e = d(rng);
    if (dot(v, gq, v) == 0) continue;
    QMat s2 = reflection(gq, v);
    CHECK(s2 * s2 == QMat::identity(n));
    CHECK(det(s2) == -1);
    CHECK(s2 * gq * s2.transposed() == gq);
    ++done;
  }
}

TEST_CASE("hensel lift: defect-halving oracle") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> d(-3, 3);
  for (const long p : {2L, 3L, 5L}) {
    int done = 0;
    while (done < 25) {
      std::size_t n = 2 + done % 2;
      IMat g = random_even_gram(rng, n, 3);
      QMat gq = to_rat(g);
      QMat f = random_reflection_product(rng, gq, 2);
      // perturb by p^a * R
      long a = 6;
      QMat pert = f;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          pert(i, j) += Rat(d(rng)) * Rat(pow_int(p, a));
      long d0 = defect_valuation(gq, pert, p);
      if (d0 >= 1000000 || d0 <= (p == 2 ? 2 : 0)) continue;
      QMat lifted;
      try {
        lifted = hensel_lift_isometry(gq, pert, p, 2 * d0 - 2);
      } catch (const std::domain_error&) {
        continue;  // badly conditioned sample
      }
      CHECK(defect_valuation(gq, lifted, p) >= 2 * d0 - 2);
      ++done;
    }
  }
}

TEST_CASE("hensel lift: exact isometry is a fixpoint") {
  std::mt19937_64 rng(7);
  IMat g = random_even_gram(rng, 3, 3);
  QMat gq = to_rat(g);
  QMat f = random_reflection_product(rng, gq, 2);
  QMat lifted = hensel_lift_isometry(gq, f, 3, 50);
  CHECK(lifted == f);
}

TEST_CASE("reflection_decomposition: single reflection and identity") {
  std::mt19937_64 rng(11);
  IMat g = random_even_gram(rng, 3, 3);
  QMat gq = to_rat(g);
  QVec x{Rat(1), Rat(2), Rat(-1)};
  if (dot(x, gq, x) == 0) x[2] = 3;
  REQUIRE(dot(x, gq, x) != 0);
  QMat s = reflection(gq, x);
  auto chain = reflection_decomposition(gq, s, 3, 8);
  REQUIRE(chain.has_value());
  QMat prod = QMat::identity(3);
  for (const auto& v : chain->vectors) {
    QVec vq(3);
    for (std::size_t c = 0; c < 3; ++c) vq[c] = Rat(v[c]);
    prod = prod * reflection(gq, vq);
  }
  CHECK(matrix_valuation(s - prod, 3) >= 8);

  auto idchain = reflection_decomposition(gq, QMat::identity(3), 2, 10);
  REQUIRE(idchain.has_value());
  QMat prod2 = QMat::identity(3);
  for (const auto& v : idchain->vectors) {
    QVec vq(3);
    for (std::size_t c = 0; c < 3; ++c) vq[c] = Rat(v[c]);
    prod2 = prod2 * reflection(gq, vq);
  }
  CHECK(matrix_valuation(QMat::identity(3) - prod2, 2) >= 10);
}

TEST_CASE("reflection_decomposition: compose-and-compare on random products") {
  std::mt19937_64 rng(13);
  for (const long p : {2L, 3L, 5L}) {
    int done = 0;
    while (done < 20) {
      std::size_t n = 2 + done % 3;
      IMat g = random_even_gram(rng, n, 2);
      QMat gq = to_rat(g);
      QMat f = random_reflection_product(rng, gq, 4);
      auto chain = reflection_decomposition(gq, f, p, 20);
      if (!chain) {
        // allowed: caller手 would Hensel-retry; here just try a higher budget
        continue;
      }
      QMat prod = QMat::identity(n);
      for (const auto& v : chain->vectors) {
        QVec vq(n);
        for (std::size_t c = 0; c < n; ++c) vq[c] = Rat(v[c]);
        prod = prod * reflection(gq, vq);
      }
      CHECK(matrix_valuation(f - prod, p) >= 20);
      ++done;
    }
  }
}

TEST_CASE("weak_approximation: empty targets, single prime, two primes") {
  std::mt19937_64 rng(17);
  IMat g = random_even_gram(rng, 3, 2);
  QMat gq = to_rat(g);
  CHECK(weak_approximation(gq, {}) == QMat::identity(3));

  int done = 0;
  while (done < 10) {
    QMat f2 = random_reflection_product(rng, gq, 2);
    QMat f3 = random_reflection_product(rng, gq, 4);
    std::vector<ApproximateIsometry> targets;
    targets.push_back({Int(2), f2, 8, Int(1)});
    targets.push_back({Int(3), f3, 6, Int(1)});
    QMat f;
    try {
      f = weak_approximation(gq, targets);
    } catch (const std::invalid_argument&) {
      // determinant condition can fail for a random product; resample
      continue;
    }
    CHECK(f * gq * f.transposed() == gq);
    CHECK(det(f) == 1);
    CHECK(matrix_valuation(f - f2, 2) >= 8);
    CHECK(matrix_valuation(f - f3, 3) >= 6);
    ++done;
  }
}

TEST_CASE("error_constants: Lemma bounds hold on random samples") {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> d(-6, 6);
  const Int p = 5;
  int done = 0;
  while (done < 1000) {
    std::size_t n = 2 + done % 3;
    IMat g = random_even_gram(rng, n, 3);
    QMat gq = to_rat(g);
    QVec x(n), h(n);
    for (auto& e : x) e = d(rng);
    for (auto& e : h) e = Rat(d(rng)) * Rat(25);  // ||h|| <= 1/25 < ||x||
    Rat x2 = dot(x, gq, x);
    if (x2 == 0) continue;
    bool zx = true, zh = true;
    for (auto& e : x) if (e != 0) zx = false;
    for (auto& e : h) if (e != 0) zh = false;
    if (zx || zh) continue;
    QVec xh(n);
    for (std::size_t c = 0; c < n; ++c) xh[c] = x[c] + h[c];
    if (dot(xh, gq, xh) == 0) continue;
    ErrorBound eb;
    try {
      eb = error_constants(gq, x, h, p);
    } catch (const std::invalid_argument&) {
      continue;
    }
    QMat diff = reflection(gq, x) - reflection(gq, xh);
    long dv = matrix_valuation(diff, p);
    Rat lhs = dv >= 1000000 ? Rat(0) : (dv >= 0 ? make_rat(1, pow_int(p, dv)) : Rat(pow_int(p, -dv)));
    // ||h||_p
    long hv = 1000000;
    for (const auto& e : h)
      if (e != 0) hv = std::min(hv, valuation(e, p));
    Rat nh = hv >= 1000000 ? Rat(0) : (hv >= 0 ? make_rat(1, pow_int(p, hv)) : Rat(pow_int(p, -hv)));
    CHECK(lhs <= eb.c * nh);
    ++done;
  }
}

TEST_CASE("norm_generator: examples and preservation") {
  IVec g1 = norm_generator(lattice_A1(), 2);
  CHECK(dot(g1, lattice_A1().gram(), g1) == -2);

  IntegerLattice u = lattice_U();
  IVec g2 = norm_generator(u, 2);
  Int nrm = dot(g2, u.gram(), g2);
  CHECK(valuation(nrm, 2) == 1);

  std::mt19937_64 rng(23);
  int done = 0;
  while (done < 60) {
    IMat g = random_even_gram(rng, 2 + done % 3, 3);
    IntegerLattice L(g);
    for (const Int& p : prime_divisors(2 * L.disc())) {
      IVec ng = norm_generator(L, p);
      QVec xq(L.rank());
      for (std::size_t c = 0; c < L.rank(); ++c) xq[c] = Rat(ng[c]);
      QMat s = reflection(to_rat(g), xq);
      // reflection in a norm generator preserves L tensor Z_p
      CHECK(matrix_valuation(s, p) >= 0);
    }
    ++done;
  }
}

TEST_CASE("local_gram_isometry: conjugate pairs at every relevant prime") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<std::size_t> pick(0, 2);
  std::uniform_int_distribution<int> coef(-2, 2);
  int done = 0;
  while (done < 40) {
    std::size_t n = 2 + done % 2;
    IMat g = random_even_gram(rng, n, 3);
    IMat u = IMat::identity(n);
    for (int s = 0; s < 8; ++s) {
      std::size_t i = pick(rng) % n, j = pick(rng) % n;
      if (i == j) continue;
      int t = coef(rng);
      for (std::size_t c = 0; c < n; ++c) u(i, c) += t * u(j, c);
    }
    IMat g2 = u * g * u.transposed();
    for (const Int& p : prime_divisors(2 * abs(det(g)))) {
      QMat s = local_gram_isometry(g, g2, p, 10);
      CHECK(matrix_valuation(to_rat(g) - s * to_rat(g2) * s.transposed(), p) >= 10);
      CHECK(matrix_valuation(s, p) >= 0);
      Rat ds = det(s);
      CHECK(valuation(ds, p) == 0);
    }
    ++done;
  }
}

TEST_CASE("local_gram_isometry: a sign-walking pair at p = 2") {
  IntegerLattice l1 = lattice_U().direct_sum(lattice_rank1(6));
  IMat a2neg{{2, 1}, {1, 2}};
  IntegerLattice l2 = IntegerLattice(a2neg).direct_sum(lattice_rank1(-2));
  REQUIRE(same_genus(l1, l2));
  QMat s = local_gram_isometry(l1.gram(), l2.gram(), 2, 8);
  CHECK(matrix_valuation(to_rat(l1.gram()) - s * to_rat(l2.gram()) * s.transposed(), 2) >= 8);
  QMat s3 = local_gram_isometry(l1.gram(), l2.gram(), 3, 8);
  CHECK(matrix_valuation(to_rat(l1.gram()) - s3 * to_rat(l2.gram()) * s3.transposed(), 3) >= 8);
}

TEST_CASE("padic_normal_form: unit scaling and exact block transform") {
  auto nf = padic_normal_form(lattice_rank1(2), 3, 6);
  // [2] at p = 3: 2 is a nonresidue mod 3; canonical unit is the fixed
  // nonresidue representative
  CHECK(nf.normal_form(0, 0) != 0);

  auto nfu = padic_normal_form(lattice_U(), 2, 6);
  CHECK(nfu.normal_form == nfu.basis * to_rat(lattice_U().gram()) * nfu.basis.transposed());

  std::mt19937_64 rng(31);
  int done = 0;
  while (done < 40) {
    IMat g = random_even_gram(rng, 2 + done % 2, 4);
    for (const Int& p : prime_divisors(2 * abs(det(g)))) {
      auto r = padic_normal_form(IntegerLattice(g), p, 8);
      CHECK(r.normal_form == r.basis * to_rat(g) * r.basis.transposed());
      // block diagonal with off-diagonal entries vanishing to precision
      // (exact zeros away from 2x2 blocks by construction)
    }
    ++done;
  }
}
