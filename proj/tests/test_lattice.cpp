#include <functional>
#include <random>

#include "doctest.h"
#include "hyperlat/binary_forms.hpp"
#include "hyperlat/lattice.hpp"
#include "hyperlat/short_vectors.hpp"

using namespace hyperlat;

namespace {

IMat random_unimodular(std::mt19937_64& rng, std::size_t n, int steps = 12) {
  IMat u = IMat::identity(n);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<int> coef(-2, 2);
  for (int s = 0; s < steps; ++s) {
    std::size_t i = pick(rng), j = pick(rng);
    if (i == j) continue;
    int t = coef(rng);
    for (std::size_t c = 0; c < n; ++c) u(i, c) += t * u(j, c);
  }
  return u;
}

// brute-force count of norm -2 vectors with a naive coefficient box
std::vector<IVec> roots_by_box(const IntegerLattice& M, long radius) {
  std::vector<IVec> out;
  const std::size_t n = M.rank();
  IVec x(n, Int(0));
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == n) {
      if (dot(x, M.gram(), x) == -2) {
        IVec y = x;
        for (std::size_t j = 0; j < n; ++j)
          if (x[j] != 0) {
            if (x[j] < 0)
              for (auto& e : y) e = -e;
            break;
          }
        out.push_back(y);
      }
      return;
    }
    for (long t = -radius; t <= radius; ++t) {
      x[i] = t;
      walk(i + 1);
    }
    x[i] = 0;
  };
  walk(0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

TEST_CASE("signature: hyperbolic plane, rank-3 example, negative definite") {
  CHECK(signature(lattice_U()) == Signature{1, 1, 0});
  IntegerLattice l3(IMat{{-2, 2, 2}, {2, -2, 2}, {2, 2, -2}});
  CHECK(signature(l3) == Signature{1, 2, 0});
  IntegerLattice nd(IMat{{-2, 0}, {0, -2}});
  CHECK(signature(nd) == Signature{0, 2, 0});
  IntegerLattice deg(IMat{{0, 0}, {0, 2}});
  CHECK(signature(deg) == Signature{1, 0, 1});
}

TEST_CASE("signature is invariant under unimodular conjugation") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> d(-5, 5);
  for (int it = 0; it < 200; ++it) {
    std::size_t n = 1 + it % 4;
    IMat g(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        g(i, j) = d(rng);
        g(j, i) = g(i, j);
      }
    IntegerLattice L(g);
    IMat u = random_unimodular(rng, n);
    IntegerLattice Lc(u * g * u.transposed());
    CHECK(signature(L) == signature(Lc));
  }
}

TEST_CASE("disc of the published rank-4 lattices") {
  IntegerLattice l1 = lattice_U(6).direct_sum(lattice_A1()).direct_sum(lattice_A1());
  CHECK(l1.disc() == 144);  // 2^4 * 3^2
  IntegerLattice l2(IMat{{0, 4, 0, 0}, {4, -6, 1, 1}, {0, 1, -2, 0}, {0, 1, 0, -2}});
  CHECK(l2.disc() == 64);  // 2^6
  IntegerLattice a2neg(IMat{{-2, 1}, {1, -2}});
  CHECK(a2neg.disc() == 3);
}

TEST_CASE("divisibility: U and U(6)+A1+A1") {
  auto d = divisibility(lattice_U(), {Int(1), Int(1)});
  CHECK(d.k == 1);
  CHECK(d.g == 2);
  CHECK_FALSE(d.twice_disc_bound);

  IntegerLattice L = lattice_U(6).direct_sum(lattice_A1()).direct_sum(lattice_A1());
  auto d2 = divisibility(L, {Int(0), Int(0), Int(1), Int(0)});
  CHECK(d2.k == 2);
  CHECK(d2.g == 1);
  CHECK(d2.twice_disc_bound);

  CHECK_THROWS(divisibility(lattice_U(), {Int(2), Int(2)}));
  CHECK_THROWS(divisibility(lattice_U(), {Int(1), Int(0)}));  // isotropic
}

TEST_CASE("lemma identities: k | disc and disc(L) g^2 = |v^2| disc(v^perp)") {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> d(-4, 4);
  int done = 0;
  while (done < 300) {
    std::size_t n = 2 + static_cast<std::size_t>(done) % 3;
    IMat g(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        g(i, j) = d(rng);
        g(j, i) = g(i, j);
      }
    IntegerLattice L(g);
    if (L.det() == 0) continue;
    IVec v(n);
    for (auto& x : v) x = d(rng);
    if (content(v) != 1) continue;
    Int norm = dot(v, g, v);
    if (norm == 0) continue;
    auto dv = divisibility(L, v);
    CHECK(dv.k * dv.g == abs(norm));
    CHECK(divides(dv.k, L.disc()));
    // complement identity
    IMat vm(1, n);
    vm.set_row(0, v);
    auto comp = orthogonal_complement(L, vm);
    if (comp.lattice.det() != 0) {
      CHECK(L.disc() * dv.g * dv.g == abs(norm) * comp.lattice.disc());
    }
    ++done;
  }
}

TEST_CASE("orthogonal_quotient: split cases") {
  // U + A1, v = (1,0,0) -> A1
  IntegerLattice L = lattice_U().direct_sum(lattice_A1());
  auto q = orthogonal_quotient(L, {Int(1), Int(0), Int(0)});
  CHECK(q.rank() == 1);
  CHECK(q.gram()(0, 0) == -2);

  IntegerLattice L2 = lattice_U().direct_sum(lattice_rank1(-4));
  auto q2 = orthogonal_quotient(L2, {Int(1), Int(0), Int(0)});
  CHECK(q2.gram()(0, 0) == -4);

  // U(11) + [-2], v = (1,0,0): disc bookkeeping via the det identity
  IntegerLattice L3 = lattice_U(11).direct_sum(lattice_A1());
  auto q3 = orthogonal_quotient(L3, {Int(1), Int(0), Int(0)});
  CHECK(q3.rank() == 1);
  // v^perp = <v, e3>, quotient = [-2]
  CHECK(q3.gram()(0, 0) == -2);

  CHECK_THROWS(orthogonal_quotient(L, {Int(0), Int(0), Int(1)}));
}

TEST_CASE("root_sublattice: examples and box-search oracle") {
  IntegerLattice m1 = lattice_A1().direct_sum(lattice_A1());
  CHECK(root_sublattice(m1).rank() == 2);
  CHECK(root_sublattice(lattice_rank1(-4)).rank() == 0);
  IntegerLattice m2(IMat{{-2, 1}, {1, -4}});
  CHECK(root_sublattice(m2).rank() == 1);
  CHECK_THROWS(root_sublattice(lattice_U()));

  // agreement with brute force on random negative definite lattices
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> d(-3, 3);
  int done = 0;
  while (done < 60) {
    std::size_t n = 1 + static_cast<std::size_t>(done) % 3;
    IMat g(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        g(i, j) = d(rng);
        g(j, i) = g(i, j);
      }
    IntegerLattice M(g);
    if (!signature(M).negative_definite()) continue;
    auto roots = vectors_of_norm(-M.gram(), 2);
    auto brute = roots_by_box(M, 6);
    CHECK(roots.size() == brute.size());
    ++done;
  }
}

TEST_CASE("isotropic_vector: examples from the tables") {
  auto v = isotropic_vector(lattice_U());
  REQUIRE(v.has_value());
  CHECK(dot(*v, lattice_U().gram(), *v) == 0);

  // [10] + A2 is anisotropic: 2*disc = 60 is not a square
  IntegerLattice ani = lattice_rank1(10).direct_sum(lattice_A2());
  CHECK_FALSE(is_isotropic(ani));
  CHECK_FALSE(isotropic_vector(ani).has_value());

  // U(11) + [-2]: 2*disc = 484 = 22^2
  IntegerLattice iso = lattice_U(11).direct_sum(lattice_A1());
  auto w = isotropic_vector(iso);
  REQUIRE(w.has_value());
  CHECK(dot(*w, iso.gram(), *w) == 0);
  CHECK(content(*w) == 1);
}

TEST_CASE("rank-2 isotropy agrees with the perfect-square criterion") {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> d(-8, 8);
  int done = 0;
  while (done < 1000) {
    IMat g(2, 2);
    g(0, 0) = d(rng);
    g(1, 1) = d(rng);
    g(0, 1) = d(rng);
    g(1, 0) = g(0, 1);
    IntegerLattice L(g);
    if (L.det() == 0) continue;
    auto v = isotropic_vector(L);
    bool expect = is_perfect_square(-L.det());
    CHECK(v.has_value() == expect);
    if (v) {
      CHECK(dot(*v, g, *v) == 0);
      CHECK(content(*v) == 1);
    }
    ++done;
  }
}

TEST_CASE("isotropic_vector output is isotropic and primitive on random rank 3/4") {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> d(-5, 5);
  int done = 0;
  while (done < 120) {
    std::size_t n = 3 + static_cast<std::size_t>(done) % 2;
    IMat g(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        g(i, j) = d(rng);
        g(j, i) = g(i, j);
      }
    IntegerLattice L(g);
    if (L.det() == 0) continue;
    auto v = isotropic_vector(L);
    if (v) {
      CHECK(dot(*v, g, *v) == 0);
      CHECK(content(*v) == 1);
    }
    ++done;
  }
}

TEST_CASE("binary_represents: spec examples") {
  CHECK(binary_represents(lattice_U(), 0));
  IntegerLattice m(IMat{{2, 1}, {1, -2}});
  CHECK(binary_represents(m, -2));
  CHECK_THROWS(binary_represents(lattice_A1(), 0));
}

TEST_CASE("binary_represents against bounded enumeration") {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> d(-6, 6);
  std::uniform_int_distribution<int> td(-8, 8);
  int done = 0;
  while (done < 400) {
    IMat g(2, 2);
    g(0, 0) = d(rng);
    g(1, 1) = d(rng);
    g(0, 1) = d(rng);
    g(1, 0) = g(0, 1);
    IntegerLattice L(g);
    if (L.det() == 0) continue;
    Int t = td(rng);
    bool got = binary_represents(L, t);
    // one-sided brute check: a witness in a box forces "true"
    bool witness = false;
    for (long x = -30; x <= 30 && !witness; ++x)
      for (long y = -30; y <= 30; ++y) {
        IVec v{Int(x), Int(y)};
        if ((x || y) && dot(v, g, v) == t) {
          witness = true;
          break;
        }
      }
    if (witness) CHECK(got);
    if (!got) CHECK_FALSE(witness);
    ++done;
  }
}
