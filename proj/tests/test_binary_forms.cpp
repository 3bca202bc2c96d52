#include <functional>
#include <random>
#include <set>

#include "doctest.h"
#include "hyperlat/binary_forms.hpp"

using namespace hyperlat;

namespace {

BinQF transform(const BinQF& f, const Int& p, const Int& q, const Int& r,
                const Int& s) {
  // f((x,y) * [[p,q],[r,s]]^T): substitute x -> p x + q y, y -> r x + s y
  Int a = f.eval(p, r);
  Int c = f.eval(q, s);
  Int b = 2 * f.a * p * q + f.b * (p * s + q * r) + 2 * f.c * r * s;
  return BinQF{a, b, c};
}

BinQF random_sl2_conjugate(const BinQF& f, std::mt19937_64& rng, int steps = 8) {
  Int p = 1, q = 0, r = 0, s = 1;
  std::uniform_int_distribution<int> d(-3, 3);
  for (int i = 0; i < steps; ++i) {
    int t = d(rng);
    if (i % 2 == 0) {
      // [[1,t],[0,1]]
      q += t * p;
      s += t * r;
    } else {
      p += t * q;
      r += t * s;
    }
  }
  return transform(f, p, q, r, s);
}

}  // namespace

TEST_CASE("proper equivalence is invariant under SL2 moves") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> d(-7, 7);
  int done = 0;
  while (done < 400) {
    BinQF f{d(rng), d(rng), d(rng)};
    if (f.disc() == 0) continue;
    BinQF g = random_sl2_conjugate(f, rng);
    CHECK(properly_equivalent(f, g));
    CHECK(equivalent(f, g));
    ++done;
  }
}

TEST_CASE("forms of different discriminant are never equivalent") {
  CHECK_FALSE(properly_equivalent(BinQF{1, 0, -2}, BinQF{1, 0, -3}));
}

TEST_CASE("indefinite cycle: small known class numbers") {
  // disc 5: one class, principal
  BinQF f{1, 1, -1};
  CHECK(f.disc() == 5);
  CHECK(properly_equivalent(f, BinQF{-1, 1, 1}));
  // disc 8: forms (1,2,-1) and (-1,2,1) are properly equivalent (one class)
  BinQF h{1, 2, -1};
  CHECK(h.disc() == 8);
  CHECK(properly_equivalent(h, BinQF{-1, 2, 1}));
}

TEST_CASE("representation: square discriminant factorization route") {
  // U-form: 2xy
  BinQF u{0, 2, 0};
  CHECK(represents(u, 0));
  CHECK(represents(u, 2));
  CHECK(represents(u, -2));
  CHECK(represents(u, 6));
  CHECK_FALSE(represents(u, 1));  // 2xy is always even
  // x^2 - y^2
  BinQF w{1, 0, -1};
  CHECK(represents(w, 0));
  CHECK(represents(w, 5));
  CHECK_FALSE(represents(w, 2));  // x^2-y^2 != 2 mod 4 reachable? 2 = (x-y)(x+y) same parity -> no
}

TEST_CASE("representation matches brute force on random forms") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> d(-6, 6);
  std::uniform_int_distribution<int> td(-10, 10);
  int done = 0;
  while (done < 500) {
    BinQF f{d(rng), d(rng), d(rng)};
    if (f.disc() == 0) continue;
    Int t = td(rng);
    bool found = false;
    for (long x = -40; x <= 40 && !found; ++x)
      for (long y = -40; y <= 40; ++y)
        if ((x || y) && f.eval(x, y) == t) {
          found = true;
          break;
        }
    bool got = (t == 0) ? represents(f, 0) : represents(f, t);
    if (t == 0 && found) CHECK(got);
    if (t != 0) {
      if (found) CHECK(got);
      if (!got) CHECK_FALSE(found);
    }
    ++done;
  }
}

TEST_CASE("even_binary_classes: hyperbolic isotropic dets give U(n,k)") {
  auto cls = even_binary_classes(Int(-4));  // det -4 = -(2^2)
  // U(2,0), U(2,1)
  CHECK(cls.size() == 2);
  auto cls1 = even_binary_classes(Int(-1));
  CHECK(cls1.size() == 1);
}

TEST_CASE("even_binary_classes: nonsquare hyperbolic dets are complete") {
  // Every even Gram with small entries and target det must be equivalent to
  // some listed class.
  std::mt19937_64 rng(99);
  // det(even Gram) = 4ac - b^2 is 0 or 3 mod 4; -2 and -6 are unrealizable.
  CHECK(even_binary_classes(Int(-2)).empty());
  CHECK(even_binary_classes(Int(-6)).empty());
  for (const long target : {-5L, -8L, -12L, -13L, -17L, -20L, -24L}) {
    auto cls = even_binary_classes(Int(target));
    CHECK(!cls.empty());
    for (long a = -6; a <= 6; ++a)
      for (long b = -6; b <= 6; ++b)
        for (long c = -6; c <= 6; ++c) {
          IMat g(2, 2);
          g(0, 0) = 2 * a;
          g(0, 1) = b;
          g(1, 0) = b;
          g(1, 1) = 2 * c;
          if (det(g) != target) continue;
          BinQF f = form_of(IntegerLattice(g));
          bool matched = false;
          for (const auto& rep : cls)
            if (equivalent(f, form_of(rep))) {
              matched = true;
              break;
            }
          CHECK(matched);
        }
  }
}

TEST_CASE("binary isotropic vectors are correct") {
  std::mt19937_64 rng(111);
  std::uniform_int_distribution<int> d(-9, 9);
  int done = 0;
  while (done < 300) {
    BinQF f{d(rng), d(rng), d(rng)};
    Int D = f.disc();
    if (D == 0) continue;
    auto v = binary_isotropic_vector(f);
    if (is_perfect_square(D) && D > 0) {
      REQUIRE(v.has_value());
      CHECK(f.eval((*v)[0], (*v)[1]) == 0);
      CHECK(content(*v) == 1);
    } else {
      CHECK_FALSE(v.has_value());
    }
    ++done;
  }
}
