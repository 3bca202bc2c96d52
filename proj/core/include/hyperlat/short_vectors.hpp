#pragma once

#include <functional>
#include <vector>

#include "hyperlat/mat.hpp"

namespace hyperlat {

struct ShortVector {
  IVec v;
  Int norm;
};

// LLL reduction of a positive definite integer Gram matrix (delta = 3/4),
// exact rational arithmetic. Returns the reduced Gram; U holds the basis
// change, reduced = U * G * U^T.
IMat lll_gram(const IMat& gram, IMat* transform = nullptr);

// All vectors x != 0 with 0 < x^T G x <= bound, up to sign (positive
// definite G; Fincke-Pohst with exact rational Cholesky).
std::vector<ShortVector> short_vectors(const IMat& gram, const Int& bound);

// Vectors of exactly the given norm, up to sign.
std::vector<IVec> vectors_of_norm(const IMat& gram, const Int& norm);

}  // namespace hyperlat
