#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hyperlat/mat.hpp"

namespace hyperlat {

/**
 * A finite quadratic form: a finite abelian group in invariant-factor form
 * with q: A -> Q/2Z and the associated bilinear b: A x A -> Q/Z.
 *
 * Elements are coefficient vectors against the generators, reduced mod the
 * orders. q values are kept normalized to [0,2), b values to [0,1).
 */
class FiniteQuadraticForm {
 public:
  FiniteQuadraticForm() = default;
  // orders: invariant factors (each > 1, ascending divisibility);
  // q: matrix with q(g_i) on the diagonal, b(g_i,g_j) off it.
  FiniteQuadraticForm(std::vector<Int> orders, QMat q);

  std::size_t num_gens() const { return orders_.size(); }
  const std::vector<Int>& orders() const { return orders_; }
  const QMat& q_matrix() const { return q_; }
  Int group_order() const;
  // minimal number of generators of the p-part
  std::size_t length_at(const Int& p) const;

  IVec reduce(IVec x) const;
  IVec add(const IVec& x, const IVec& y) const;
  IVec scale(const IVec& x, const Int& t) const;
  bool is_zero_elt(const IVec& x) const;
  Int order_of(const IVec& x) const;

  Rat q_of(const IVec& x) const;              // in [0, 2)
  Rat b_of(const IVec& x, const IVec& y) const;  // in [0, 1)

  FiniteQuadraticForm negated() const;
  FiniteQuadraticForm direct_sum(const FiniteQuadraticForm& o) const;

  // Restriction to the p-primary component; returns the component form and
  // its generators as elements of this form.
  FiniteQuadraticForm p_component(const Int& p, std::vector<IVec>* gens) const;

  void for_each_element(const std::function<void(const IVec&)>& fn) const;
  std::vector<IVec> all_elements() const;

  // Milgram signature mod 8 via the Gauss sum. The sum is provably sqrt(|A|)
  // times an 8th root of unity; evaluation is numeric with a wide safety
  // margin and verified against that shape.
  int gauss_signature_mod8() const;

  bool is_isomorphic_to(const FiniteQuadraticForm& o) const;
  // All isomorphisms gamma with q(gamma x) = sign * q(x); sign is +1 or -1.
  // Each entry maps generator i of *this to row i (an element of target).
  std::vector<IMat> all_isometries(const FiniteQuadraticForm& target, int sign,
                                   bool first_only = false) const;

  bool operator==(const FiniteQuadraticForm& o) const {
    return orders_ == o.orders_ && q_ == o.q_;
  }

 private:
  std::vector<Int> orders_;
  QMat q_;
};

/**
 * A subgroup of a finite quadratic form, with its induced form.
 */
class SubgroupWithForm {
 public:
  SubgroupWithForm(const FiniteQuadraticForm& parent, const IMat& generator_rows);

  Int order() const { return order_; }
  // generators of the subgroup as elements of the parent (rows)
  const IMat& gens_in_parent() const { return gens_in_parent_; }
  const FiniteQuadraticForm& form() const { return form_; }
  // canonical HNF key for dedup
  const IMat& key() const { return key_; }

 private:
  IMat gens_in_parent_;
  FiniteQuadraticForm form_;
  IMat key_;
  Int order_ = 1;
};

// All subgroups of the given order (cyclic-extension enumeration).
std::vector<SubgroupWithForm> subgroups_of_order(const FiniteQuadraticForm& A,
                                                 const Int& n);

// Anti-isometries H1 -> H2 as maps of subgroup generators; empty when none.
std::vector<IMat> anti_isometries(const SubgroupWithForm& H1,
                                  const SubgroupWithForm& H2,
                                  bool first_only = false);

}  // namespace hyperlat
