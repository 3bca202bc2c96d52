#pragma once

#include <map>
#include <optional>
#include <string>

#include "hyperlat/disc_form.hpp"
#include "hyperlat/lattice.hpp"

namespace hyperlat {

// One Jordan constituent p^scale * (unimodular of the given rank).
struct JordanConstituent {
  long scale = 0;
  std::size_t rank = 0;
  // odd p: Legendre character of the unit determinant.
  // p = 2: +1 when the unit determinant is +-1 mod 8, else -1.
  int eps = 1;
  // p = 2 only:
  Int det_mod8 = 1;       // odd unit class of the determinant, in {1,3,5,7}
  bool even_type = true;  // type II
  int oddity = 0;         // trace of the odd diagonal part, mod 8
};

struct JordanDecomposition {
  Int p;
  std::vector<JordanConstituent> constituents;  // scales strictly ascending
};

struct GenusSymbol {
  Signature sig;
  Int det;  // signed
  std::map<Int, JordanDecomposition> local;  // p | 2 det
};

JordanDecomposition jordan_decomposition(const IntegerLattice& L, const Int& p);

// Jordan splitting with its transform: blocks(i) = p^{scale_i} * unimodular,
// basis rows have p-unit denominators, basis * G * basis^T = block diagonal.
struct JordanSplit {
  std::vector<long> scales;
  std::vector<QMat> blocks;  // unimodular parts NOT divided out; raw blocks
  QMat basis;
};
JordanSplit jordan_split(const QMat& gram, const Int& p);

GenusSymbol genus_symbol(const IntegerLattice& L);
std::string genus_symbol_string(const IntegerLattice& L);

// Hash of signature + canonical odd-p symbols + (rank, scale, parity) at 2.
std::string genus_hash(const IntegerLattice& L);

bool same_genus(const IntegerLattice& L1, const IntegerLattice& L2);

// Homogeneous orthogonal decomposition of the p-part of a finite quadratic
// form: scale k |-> form on (Z/p^k)^{r_k}.
std::map<long, FiniteQuadraticForm> homogeneous_decomposition(
    const FiniteQuadraticForm& A, const Int& p);

bool exists_even_lattice(const Signature& sig, const FiniteQuadraticForm& D);

// An even lattice realizing the invariants; rank <= 3. Throws when
// exists_even_lattice is false or the (rank-3) search budget is exceeded.
IntegerLattice lattice_with_invariants(const Signature& sig,
                                       const FiniteQuadraticForm& D);

// The even unimodular lattice of signature (n,n) containing L + L(-1)
// primitively (diagonal gluing along A_L).
struct UnimodularGlue {
  IntegerLattice lambda;
  QMat basis;  // rows in (L + L(-1))-coordinates
};
UnimodularGlue unimodular_glue(const IntegerLattice& L);

// Milgram: signature of the discriminant form mod 8.
int milgram_signature(const IntegerLattice& L);

}  // namespace hyperlat
