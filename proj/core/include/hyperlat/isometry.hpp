#pragma once

#include <map>
#include <optional>
#include <string>

#include "hyperlat/genus.hpp"
#include "hyperlat/lattice.hpp"

namespace hyperlat {

enum class Evidence {
  Trivial,           // rank/determinant/signature screens, small-rank forms
  DifferentGenus,
  SingleSpinorGenus,
  SpinorGenerator,   // index joins the lattices (isometric)
  SpinorObstruction, // index obstructs (not isometric)
  ExplicitMap,
};

struct IsometryVerdict {
  bool isometric = false;
  Evidence evidence = Evidence::Trivial;
  std::optional<QMat> map;  // when present: map * gram2 * map^T == gram1
  Rat index = 0;            // spinor index r when relevant
};

// Full dispatcher: degenerate, rank 1, rank 2, definite, indefinite.
IsometryVerdict is_isometric(const IntegerLattice& L1, const IntegerLattice& L2);

// Plesken-Souvignier style backtracking for definite lattices.
IsometryVerdict definite_isometric(const IntegerLattice& L1,
                                   const IntegerLattice& L2);

// Appendix isometry test for indefinite lattices of rank >= 3.
IsometryVerdict indefinite_isometric(const IntegerLattice& L1,
                                     const IntegerLattice& L2);

// Rational matrix f with f * gram2 * f^T == gram1 (same genus required).
QMat rational_isometry(const IntegerLattice& L1, const IntegerLattice& L2);

/**
 * Hash-bucketed set of isometry-class representatives. Inserts confirm
 * J by exact isometry tests against the bucket.
 */
class ClassRegistry {
 public:
  struct InsertResult {
    bool was_new = false;
    std::size_t index = 0;  // representative index
  };

  InsertResult insert(const IntegerLattice& L);
  InsertResult insert(const IntegerLattice& L, const std::string& hash);
  // lookup without inserting; empty when no representative is isometric
  std::optional<std::size_t> find(const IntegerLattice& L) const;

  std::size_t size() const { return entries_.size(); }
  const IntegerLattice& representative(std::size_t i) const {
    return entries_[i].lattice;
  }
  const std::string& hash_of(std::size_t i) const { return entries_[i].hash; }

 private:
  struct Entry {
    IntegerLattice lattice;
    std::string hash;
    // lazy genus-level caches
    mutable std::optional<std::size_t> spinor_log2;
  };
  std::map<std::string, std::vector<std::size_t>> buckets_;
  std::vector<Entry> entries_;
};

}  // namespace hyperlat
