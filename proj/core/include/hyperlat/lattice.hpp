#pragma once

#include <optional>
#include <string>

#include "hyperlat/mat.hpp"

namespace hyperlat {

struct Signature {
  int n_plus = 0;
  int n_minus = 0;
  int n_zero = 0;

  bool operator==(const Signature&) const = default;
  int rank() const { return n_plus + n_minus + n_zero; }
  bool nondegenerate() const { return n_zero == 0; }
  bool hyperbolic() const {
    return n_plus == 1 && n_zero == 0 && n_minus == rank() - 1;
  }
  bool negative_definite() const { return n_plus == 0 && n_zero == 0; }
  bool positive_definite() const { return n_minus == 0 && n_zero == 0; }
  bool definite() const { return negative_definite() || positive_definite(); }
  bool indefinite() const { return n_plus > 0 && n_minus > 0; }
};

// Lemma-style divisibility record of a primitive vector v: k generates the
// ideal v.L, and k*g = |v^2|.
struct DivisibilityData {
  Int k;
  Int g;
  // 2g <= k, equivalently 2 disc(v^perp) <= disc(L).
  bool twice_disc_bound = false;
};

/**
 * A free Z-module of finite rank with an integral symmetric bilinear form,
 * held as its Gram matrix. Values are immutable after construction.
 */
class IntegerLattice {
 public:
  IntegerLattice() = default;
  explicit IntegerLattice(IMat gram, std::string name = "");

  const IMat& gram() const { return gram_; }
  const std::string& name() const { return name_; }
  std::size_t rank() const { return gram_.rows(); }

  bool is_even() const;
  Int det() const;
  // |det|; throws on degenerate lattices.
  Int disc() const;
  bool nondegenerate() const { return det() != 0; }

  IntegerLattice rescaled(const Int& m) const;  // L(m)
  IntegerLattice direct_sum(const IntegerLattice& other) const;

  bool operator==(const IntegerLattice& o) const { return gram_ == o.gram_; }

 private:
  IMat gram_;
  std::string name_;
};

// Named constructors following the usual conventions: roots have norm -2,
// definite root lattices are negative definite.
IntegerLattice lattice_U();                         // [[0,1],[1,0]]
IntegerLattice lattice_U(const Int& n);             // [[0,n],[n,0]]
IntegerLattice lattice_U(const Int& n, const Int& k);  // [[0,n],[n,2k]]
IntegerLattice lattice_A1();
IntegerLattice lattice_A2();
IntegerLattice lattice_rank1(const Int& m);  // [m]

Signature signature(const IntegerLattice& L);

Int disc(const IntegerLattice& L);

// Requires v primitive with v^2 != 0.
DivisibilityData divisibility(const IntegerLattice& L, const IVec& v);

// v^perp / <v> for a primitive isotropic v in a hyperbolic lattice; the
// result is negative definite of rank n-2.
IntegerLattice orthogonal_quotient(const IntegerLattice& L, const IVec& v);

// Orthogonal complement of the sublattice spanned by the given rows, as a
// lattice with its basis matrix (rows, in L-coordinates).
struct SublatticeWithBasis {
  IntegerLattice lattice;
  IMat basis;  // rows are vectors in L-coordinates
};
SublatticeWithBasis orthogonal_complement(const IntegerLattice& L,
                                          const IMat& span_rows);

// Sublattice spanned by all vectors of norm -2 of a negative definite
// lattice.
IntegerLattice root_sublattice(const IntegerLattice& M);

// Greedy entry-size reduction by elementary unimodular moves; reduced =
// U * gram * U^T with the transform rows in U.
IMat indefinite_reduce(const IMat& gram, IMat* transform = nullptr);

// A primitive isotropic vector, if the lattice represents zero nontrivially.
// Deterministic given the seed.
std::optional<IVec> isotropic_vector(const IntegerLattice& L,
                                     std::uint64_t seed = 0);

// Exact rational isotropy test (Hasse-Minkowski via Hilbert symbols).
bool is_isotropic(const IntegerLattice& L);

// Whether a rank-2 lattice represents t. Throws unless rank is 2.
bool binary_represents(const IntegerLattice& M, const Int& t);

}  // namespace hyperlat
