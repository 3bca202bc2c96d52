#pragma once

#include <optional>
#include <vector>

#include "hyperlat/lattice.hpp"

namespace hyperlat {

// Classical binary quadratic form a x^2 + b x y + c y^2. A rank-2 Gram
// matrix [[g11,g12],[g12,g22]] corresponds to (g11, 2 g12, g22).
struct BinQF {
  Int a, b, c;
  Int disc() const { return b * b - 4 * a * c; }
  Int eval(const Int& x, const Int& y) const {
    return a * x * x + b * x * y + c * y * y;
  }
  bool operator==(const BinQF&) const = default;
  bool operator<(const BinQF& o) const {
    if (a != o.a) return a < o.a;
    if (b != o.b) return b < o.b;
    return c < o.c;
  }
};

BinQF form_of(const IntegerLattice& M);

// Proper equivalence of forms of equal nonzero discriminant (definite or
// indefinite, square discriminants included).
bool properly_equivalent(const BinQF& f, const BinQF& g);

// GL_2(Z)-equivalence (proper or improper).
bool equivalent(const BinQF& f, const BinQF& g);

// Whether f represents t over Z (not necessarily primitively).
bool represents(const BinQF& f, const Int& t);

// The cycle of reduced forms properly equivalent to an indefinite form of
// positive nonsquare discriminant.
std::vector<BinQF> reduction_cycle(const BinQF& f);

// All even Gram matrices [[2a,b],[b,2c]] of the given determinant, one per
// isometry class. Complete for det < 0 (hyperbolic) and det > 0 with the
// negative definite convention.
std::vector<IntegerLattice> even_binary_classes(const Int& target_det);

// Primitive isotropic vector of an isotropic binary form.
std::optional<IVec> binary_isotropic_vector(const BinQF& f);

}  // namespace hyperlat
