#include <functional>
#include <random>

#include "doctest.h"
#include "hyperlat/disc_form.hpp"
#include "hyperlat/genus.hpp"

using namespace hyperlat;

namespace {

IntegerLattice random_even_lattice(std::mt19937_64& rng, std::size_t n,
                                   int bound, bool need_nondeg = true) {
  std::uniform_int_distribution<int> d(-bound, bound);
  for (;;) {
    IMat g(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        int x = d(rng);
        if (i == j) x = 2 * x;
        g(i, j) = x;
        g(j, i) = x;
      }
    IntegerLattice L(g);
    if (!need_nondeg || L.det() != 0) return L;
  }
}

}  // namespace

TEST_CASE("discriminant_form: U trivial, A1 = Z/2 with q = 3/2, order 30") {
  auto du = discriminant_form(lattice_U());
  CHECK(du.form.num_gens() == 0);
  CHECK(du.form.group_order() == 1);

  auto da = discriminant_form(lattice_A1());
  REQUIRE(da.form.num_gens() == 1);
  CHECK(da.form.orders()[0] == 2);
  // q(w) = -1/2, normalized into [0,2)
  CHECK(da.form.q_matrix()(0, 0) == Rat(3, 2));

  auto d30 = discriminant_form(lattice_rank1(10).direct_sum(lattice_A2()));
  CHECK(d30.form.group_order() == 30);
}

TEST_CASE("discriminant form group order equals disc") {
  std::mt19937_64 rng(12);
  for (int it = 0; it < 100; ++it) {
    IntegerLattice L = random_even_lattice(rng, 1 + it % 4, 4);
    CHECK(discriminant_form(L).form.group_order() == L.disc());
  }
}

TEST_CASE("q and b satisfy the polarization and scaling identities") {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 50; ++it) {
    IntegerLattice L = random_even_lattice(rng, 2 + it % 3, 3);
    auto D = discriminant_form(L);
    const auto& F = D.form;
    if (F.num_gens() == 0 || F.group_order() > 500) continue;
    auto els = F.all_elements();
    std::uniform_int_distribution<std::size_t> pick(0, els.size() - 1);
    for (int k = 0; k < 20; ++k) {
      const IVec& x = els[pick(rng)];
      const IVec& y = els[pick(rng)];
      // q(x+y) - q(x) - q(y) = 2 b(x,y) mod 2Z
      Rat lhs = F.q_of(F.add(x, y)) - F.q_of(x) - F.q_of(y);
      Rat rhs = Rat(2) * F.b_of(x, y);
      Rat diff = lhs - rhs;
      Int num = diff.get_num(), den = diff.get_den();
      CHECK(den == 1);
      CHECK(fdiv_r(num, 2) == 0);
      // q(nx) = n^2 q(x)
      Rat q3 = F.q_of(F.scale(x, 3));
      Rat expect = Rat(9) * F.q_of(x);
      Rat d2 = q3 - expect;
      CHECK(d2.get_den() == 1);
      CHECK(fdiv_r(Int(d2.get_num()), 2) == 0);
    }
  }
}

TEST_CASE("rescale by -1: examples and double-negation property") {
  auto da = discriminant_form(lattice_A1());
  auto neg = da.form.negated();
  CHECK(neg.q_matrix()(0, 0) == Rat(1, 2));
  std::mt19937_64 rng(17);
  for (int it = 0; it < 100; ++it) {
    IntegerLattice L = random_even_lattice(rng, 1 + it % 3, 4);
    auto F = discriminant_form(L).form;
    CHECK(F.negated().negated() == F);
  }
}

TEST_CASE("anti_isometries: spec examples") {
  // trivial subgroups -> [identity]
  FiniteQuadraticForm trivial({}, QMat(0, 0));
  SubgroupWithForm t1(trivial, IMat(0, 0));
  CHECK(anti_isometries(t1, t1).size() == 1);

  // Z/2 with q = -1/2 vs q = +1/2: exactly one
  QMat qa(1, 1), qb(1, 1);
  qa(0, 0) = Rat(3, 2);
  qb(0, 0) = Rat(1, 2);
  FiniteQuadraticForm A({2}, qa), B({2}, qb);
  IMat g(1, 1);
  g(0, 0) = 1;
  SubgroupWithForm sa(A, g), sb(B, g);
  CHECK(anti_isometries(sa, sb).size() == 1);
  CHECK(anti_isometries(sa, sa).empty());
}

TEST_CASE("primitive_extensions: index 1, the A1 glue to U, disc formula") {
  IntegerLattice m = lattice_A1();
  IntegerLattice nn = lattice_rank1(2);
  auto e1 = primitive_extensions(m, nn, 1);
  REQUIRE(e1.size() == 1);
  CHECK(e1[0].glued.gram() == m.direct_sum(nn).gram());

  auto e2 = primitive_extensions(m, nn, 2);
  REQUIRE(e2.size() == 1);
  CHECK(e2[0].glued.disc() == 1);
  CHECK(e2[0].glued.is_even());
  CHECK(signature(e2[0].glued) == Signature{1, 1, 0});

  std::mt19937_64 rng(23);
  for (int it = 0; it < 30; ++it) {
    IntegerLattice M = random_even_lattice(rng, 1 + it % 2, 3);
    IntegerLattice N = random_even_lattice(rng, 1 + (it / 2) % 2, 3);
    for (Int k = 2; k <= 3; ++k) {
      for (auto& ext : primitive_extensions(M, N, k)) {
        CHECK(ext.glued.is_even());
        CHECK(ext.glued.disc() * k * k == M.disc() * N.disc());
      }
    }
  }
}

TEST_CASE("gluing round-trip: complement of M in G is N (same disc and genus)") {
  std::mt19937_64 rng(29);
  int done = 0;
  while (done < 20) {
    IntegerLattice M = random_even_lattice(rng, 1, 4);
    IntegerLattice N = random_even_lattice(rng, 2, 3);
    for (Int k = 2; k <= 4; ++k) {
      for (auto& ext : primitive_extensions(M, N, k)) {
        // rows of M inside G: coordinates of the first block of M + N
        QMat binv = inverse(ext.basis);
        IMat mrows(M.rank(), ext.glued.rank());
        for (std::size_t i = 0; i < M.rank(); ++i)
          for (std::size_t j = 0; j < ext.glued.rank(); ++j) {
            Rat c = binv(i, j);
            REQUIRE(c.get_den() == 1);
            mrows(i, j) = c.get_num();
          }
        auto comp = orthogonal_complement(ext.glued, mrows);
        CHECK(comp.lattice.disc() == N.disc());
        CHECK(same_genus(comp.lattice, N));
      }
    }
    ++done;
  }
}

TEST_CASE("even_overlattices: spec examples") {
  // A1 + A1 at p=2: q values 3/2, 3/2, 1 -- no isotropic element
  auto e = even_overlattices(lattice_A1().direct_sum(lattice_A1()), 2);
  CHECK(e.empty());

  // two isotropic order-2 subgroups (<e/2> and <f/2>), both glue to U
  auto e2 = even_overlattices(lattice_U(2), 2);
  REQUIRE(e2.size() == 2);
  for (auto& ol : e2) {
    CHECK(ol.lattice.disc() == 1);
    CHECK(ol.lattice.is_even());
  }

  std::mt19937_64 rng(31);
  for (int it = 0; it < 60; ++it) {
    IntegerLattice L = random_even_lattice(rng, 2 + it % 2, 4);
    for (const auto& p : prime_divisors(L.disc())) {
      for (auto& ol : even_overlattices(L, p)) {
        CHECK(ol.lattice.is_even());
        CHECK(ol.lattice.disc() * p * p == L.disc());
      }
    }
  }
}

TEST_CASE("maximal_even_overlattice: fixpoints and U(2) -> U") {
  auto r = maximal_even_overlattice(lattice_U());
  CHECK(r.lattice.gram() == lattice_U().gram());
  auto r2 = maximal_even_overlattice(lattice_U(2));
  CHECK(r2.lattice.disc() == 1);
  // result admits no further even overlattice
  std::mt19937_64 rng(37);
  for (int it = 0; it < 40; ++it) {
    IntegerLattice L = random_even_lattice(rng, 2 + it % 2, 4);
    auto m = maximal_even_overlattice(L);
    for (const auto& p : prime_divisors(m.lattice.disc()))
      CHECK(even_overlattices(m.lattice, p).empty());
    CHECK(divides(m.lattice.disc(), L.disc()));
  }
}

TEST_CASE("intermediate_overlattices: index 1 and prime index") {
  IntegerLattice L = lattice_U(2);
  auto m = maximal_even_overlattice(L);  // index 2
  auto inter = intermediate_overlattices(L, m.basis);
  CHECK(inter.size() == 2);

  auto self = intermediate_overlattices(L, QMat::identity(2));
  CHECK(self.size() == 1);
}

TEST_CASE("milgram consistency between modules") {
  std::mt19937_64 rng(41);
  for (int it = 0; it < 60; ++it) {
    IntegerLattice L = random_even_lattice(rng, 1 + it % 4, 3);
    if (L.disc() > 4000) continue;
    Signature s = signature(L);
    int expect = ((s.n_plus - s.n_minus) % 8 + 8) % 8;
    CHECK(milgram_signature(L) == expect);
  }
}
