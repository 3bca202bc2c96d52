#pragma once

#include <optional>

#include "hyperlat/lattice.hpp"

namespace hyperlat {

// Approximation target at one prime: a rational matrix standing in for a
// p-adic isometry, with the congruence precision it is requested to.
struct ApproximateIsometry {
  Int p;
  QMat matrix;
  long precision = 0;  // t_p
  Int denominator = 1;  // d_p, lcm of entry denominators
};

struct ReflectionChain {
  Int p;
  long precision = 0;
  std::vector<IVec> vectors;
};

// Constants of the reflection perturbation bound (p-adic absolute values).
struct ErrorBound {
  Rat c;
  Rat d;
};

// min over entries of nu_p; empty/zero matrices rate as +big.
long matrix_valuation(const QMat& m, const Int& p);
// nu_p(G - F G F^T): how far F is from orthogonal.
long defect_valuation(const QMat& gram, const QMat& f, const Int& p);

// Reflection in x (row convention: y maps to y * S), S G S^T = G exactly.
QMat reflection(const QMat& gram, const QVec& x);

// Quadratic Hensel lifting: improves the defect of an approximate isometry
// until it is at least `target_defect`; the returned matrix is congruent to
// the input modulo p^(input defect - nu_p(2) - conditioning).
QMat hensel_lift_isometry(const QMat& gram, QMat f, const Int& p,
                          long target_defect);

// Precision-aware Cartan-Dieudonne: integer vectors whose reflection product
// is congruent to f mod p^t; nullopt when the precision budget is too small.
std::optional<ReflectionChain> reflection_decomposition(const QMat& gram,
                                                        const QMat& f,
                                                        const Int& p, long t);

// Algorithm: weak approximation in SO(V). Returns f in SO(V) (exactly
// orthogonal, det +1) with nu_p(f - f_p) >= t_p for every target.
QMat weak_approximation(const QMat& gram,
                        const std::vector<ApproximateIsometry>& targets);

ErrorBound error_constants(const QMat& gram, const QVec& x, const QVec& h,
                           const Int& p);

// x in L with x^2 generating the p-adic norm ideal n(L).
IVec norm_generator(const IntegerLattice& L, const Int& p);

// S with S g2 S^T == g1 mod p^prec, p-integral with p-unit determinant;
// exists whenever the lattices are in the same genus.
QMat local_gram_isometry(const IMat& g1, const IMat& g2, const Int& p,
                         long prec);

// Transformation to the standard p-adic block form: basis * gram * basis^T
// is block diagonal with p-power scales, odd-p unit parts normalized to
// diag(1,...,1,eps) mod p^prec.
struct PadicNormalForm {
  QMat basis;
  QMat normal_form;
};
PadicNormalForm padic_normal_form(const IntegerLattice& L, const Int& p,
                                  long prec);

}  // namespace hyperlat
