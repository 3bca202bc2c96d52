#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hyperlat/isometry.hpp"
#include "hyperlat/lattice.hpp"

namespace hyperlat {

enum class OracleVerdict {
  Finite,
  ParabolicElementary,
  HyperbolicElementary,
  NotElementary,
  Unknown,
};

std::string to_string(OracleVerdict v);
OracleVerdict oracle_verdict_from_string(const std::string& s);

inline bool finite_or_hyperbolic(OracleVerdict v) {
  return v == OracleVerdict::Finite || v == OracleVerdict::HyperbolicElementary;
}

/**
 * Pluggable symmetry-group oracle: a lookup against classification tables.
 * Lattices absent from the tables come back Unknown, never guessed.
 */
class SymmetryOracle {
 public:
  void add(const IntegerLattice& L, OracleVerdict v);
  OracleVerdict classify(const IntegerLattice& L) const;
  std::size_t size() const { return verdicts_.size(); }

 private:
  ClassRegistry registry_;
  std::vector<OracleVerdict> verdicts_;
};

// The published tables for the given rank (hyperbolic lists always; finite
// lists when shipped).
std::shared_ptr<SymmetryOracle> builtin_oracle(int rank);
// Oracle answering Unknown on everything.
std::shared_ptr<SymmetryOracle> empty_oracle();

// Gram matrices of the published rank-3 (45) and rank-4 (3) lattices with
// elementary symmetry group of hyperbolic type.
std::vector<IntegerLattice> published_rank3_hyperbolic();
std::vector<IntegerLattice> published_rank4_hyperbolic();
// Reconstructed finite-symmetry tables (empty until shipped).
std::vector<IntegerLattice> published_rank3_finite();
std::vector<IntegerLattice> published_rank4_finite();

// rank-2 closed form: Finite iff M represents neither 0 nor -2.
struct Rank2Verdict {
  OracleVerdict verdict;
  bool represents_0_or_minus2;
};
Rank2Verdict rank2_oracle(const IntegerLattice& M);

// Algorithm: the cusp test. false => not finite/hyperbolic-elementary.
bool cusp_test(const IntegerLattice& L);

// Algorithm: the sublattice test, against a rank-(n-1) oracle.
using SubOracle = std::function<OracleVerdict(const IntegerLattice&)>;
bool sublattice_test(const IntegerLattice& L, const SubOracle& oracle);

struct H1Options {
  int rank = 3;
  Int entry_bound = 18;  // upper bound of the off-diagonal range
  int threads = 1;
};

struct H1Result {
  std::size_t raw_count = 0;
  std::size_t hyperbolic_count = 0;
  ClassRegistry classes;
};

H1Result generate_H1(const H1Options& opt);

struct PipelineCounts {
  std::size_t h1_raw = 0;
  std::size_t h1 = 0;
  std::size_t m1 = 0;
  std::size_t m2 = 0;
  std::size_t m3 = 0;
  std::size_t m_needs_oracle = 0;
  std::size_t h2 = 0;
  std::size_t h2_nonmaximal = 0;
  std::size_t discard_overlattice = 0;
  std::size_t discard_cusp = 0;
  std::size_t discard_sublattice = 0;
  std::size_t discard_oracle = 0;  // explicit negative table verdicts
  std::size_t needs_oracle = 0;    // absent from every table
  std::size_t h3 = 0;
  std::size_t h3_finite = 0;
  std::size_t h3_hyperbolic = 0;
};

struct PipelineState {
  PipelineCounts counts;
  ClassRegistry h3;
  std::vector<OracleVerdict> h3_verdicts;
  std::vector<IntegerLattice> needs_oracle_report;
  // H3 classes and verdicts in insertion order match index-wise.
};

struct PipelineOptions {
  int rank = 3;
  Int entry_bound = 18;
  int threads = 1;
  std::uint64_t seed = 0;
  std::string checkpoint_dir;  // empty: no checkpoints
  std::shared_ptr<SymmetryOracle> oracle;
  // rank-4 runs use the rank-3 H3 output as the sublattice-test oracle
  const PipelineState* rank3_result = nullptr;
  std::function<void(const std::string&)> log = nullptr;
};

PipelineState run_pipeline(const PipelineOptions& opt);

struct VerifyReport {
  bool pass = false;
  std::vector<std::string> lines;
};

// Checks of the published tables: pairwise non-isometry, the rank-4
// discriminants, the isotropy count and criterion, cusp and sublattice tests.
VerifyReport verify_published(int rank);

}  // namespace hyperlat
