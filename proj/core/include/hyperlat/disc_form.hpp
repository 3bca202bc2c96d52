#pragma once

#include "hyperlat/fqf.hpp"
#include "hyperlat/lattice.hpp"

namespace hyperlat {

/**
 * The discriminant group A_L = L^vee / L of an even nondegenerate lattice,
 * with its Q/2Z quadratic form and generators kept as rational vectors in
 * L-coordinates.
 */
struct DiscriminantForm {
  FiniteQuadraticForm form;
  // rows: generators of A_L as vectors in L tensor Q (L-coordinates)
  QMat generators;
};

DiscriminantForm discriminant_form(const IntegerLattice& L);

// The lattice generated by L and the given rational vectors (L-coordinates),
// with its basis in L-coordinates. Throws unless the result is integral even.
struct OverlatticeResult {
  IntegerLattice lattice;
  QMat basis;  // rows, in L-coordinates
};
OverlatticeResult overlattice_from_generators(const IntegerLattice& L,
                                              const QMat& extra_rows);

// All even overlattices of index p (p prime), one per isotropic order-p
// subgroup of A_L.
std::vector<OverlatticeResult> even_overlattices(const IntegerLattice& L,
                                                 const Int& p);

// Deterministic maximal even overlattice (iterated isotropic saturation).
OverlatticeResult maximal_even_overlattice(const IntegerLattice& L);

// All maximal even overlattices (endpoints of every isotropic chain).
std::vector<OverlatticeResult> all_maximal_even_overlattices(
    const IntegerLattice& L);

// All even overlattices of any index (the full poset above L).
std::vector<OverlatticeResult> all_even_overlattices(const IntegerLattice& L);

// Even lattices L <= L1 <= M for a given finite-index overlattice M of L,
// where M is described by its basis in L-coordinates.
std::vector<OverlatticeResult> intermediate_overlattices(
    const IntegerLattice& L, const QMat& m_basis);

struct PrimitiveExtension {
  IntegerLattice glued;
  QMat basis;  // rows, in (M + N)-coordinates
};

// All primitive extensions M + N <= G of the given index, built from graphs
// of anti-isometries between order-index subgroups of A_M and A_N.
std::vector<PrimitiveExtension> primitive_extensions(const IntegerLattice& M,
                                                     const IntegerLattice& N,
                                                     const Int& index);

}  // namespace hyperlat
