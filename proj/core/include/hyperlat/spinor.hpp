#pragma once

#include <cstdint>
#include <vector>

#include "hyperlat/genus.hpp"
#include "hyperlat/lattice.hpp"

namespace hyperlat {

// Square class of a nonzero rational in Q_p*/(Q_p*)^2, packed into 3 bits:
// bit 0 = parity of the valuation, bits 1-2 = unit class (odd p: Legendre;
// p = 2: unit mod 8 via 1,3,5,7 -> 00,10,01,11).
std::uint8_t square_class(const Rat& x, const Int& p);

// Square classes of spinor norms of proper isometries of L tensor Z_p,
// as a subgroup (list of all member bitmasks) of Q_p*/(Q_p*)^2.
struct LocalSpinorNorms {
  Int p;
  std::vector<std::uint8_t> theta_plus;  // subgroup, contains 0
  std::uint8_t improper_shift = 0;       // class of a lattice reflection norm
  int dim() const { return p == 2 ? 3 : 2; }
};

LocalSpinorNorms local_spinor_norms(const IntegerLattice& L, const Int& p);

// Global spinor data of the genus of an indefinite lattice of rank >= 3.
struct SpinorData {
  std::vector<Int> primes;            // support of 2 det(L)
  std::vector<std::uint32_t> span;    // F2 span: theta blocks + rational relations
  std::uint32_t improper_shift = 0;   // concatenated reflection classes
  std::size_t total_dim = 0;
  std::size_t spinor_genera_log2 = 0;

  bool in_span(std::uint32_t v) const;
  std::uint32_t class_vector(const Rat& r) const;
};

SpinorData spinor_data(const IntegerLattice& L);

bool is_single_spinor_genus(const IntegerLattice& L);

// Whether index r joins L to an isometric (possibly improperly) lattice in
// its genus; the final test of the indefinite isometry decision.
bool is_improper_spinor_generator(const Rat& r, const IntegerLattice& L);

}  // namespace hyperlat
