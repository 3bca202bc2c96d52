#include "hyperlat/classify.hpp"

namespace hyperlat {

namespace {

IntegerLattice gram3(long a11, long a12, long a13, long a22, long a23,
                     long a33) {
  IMat g(3, 3);
  g(0, 0) = a11;
  g(0, 1) = a12;
  g(1, 0) = a12;
  g(0, 2) = a13;
  g(2, 0) = a13;
  g(1, 1) = a22;
  g(1, 2) = a23;
  g(2, 1) = a23;
  g(2, 2) = a33;
  return IntegerLattice(g);
}

}  // namespace

std::vector<IntegerLattice> published_rank3_hyperbolic() {
  std::vector<IntegerLattice> out;
  // [2n] + A2
  for (long n : {5, 8, 10, 11, 14, 15, 20, 24, 26, 30, 42, 48, 60, 90})
    out.push_back(lattice_rank1(2 * n).direct_sum(lattice_A2()));
  // [2n] + A1 + A1
  for (long n : {6, 7, 12, 15, 24, 36})
    out.push_back(
        lattice_rank1(2 * n).direct_sum(lattice_A1()).direct_sum(lattice_A1()));
  // [[2l,1,0],[1,-2,1],[0,1,-2]]
  for (long l : {11, 13, 15, 21, 23, 33}) out.push_back(gram3(2 * l, 1, 0, -2, 1, -2));
  // [[2l,1,0],[1,-2,0],[0,0,-2]]
  for (long l : {5, 12}) out.push_back(gram3(2 * l, 1, 0, -2, 0, -2));
  // [[2l,1,1],[1,-2,0],[1,0,-2]]
  for (long l : {3, 7}) out.push_back(gram3(2 * l, 1, 1, -2, 0, -2));
  // U(n) + [-2]
  for (long n : {11, 14, 15, 20, 24})
    out.push_back(lattice_U(n).direct_sum(lattice_A1()));
  // U(n,k) + [-2]
  for (auto [n, k] : std::vector<std::pair<long, long>>{
           {8, 2}, {8, 3}, {8, 6}, {9, 3}, {12, 3}, {12, 6}, {12, 8}, {16, 8}})
    out.push_back(lattice_U(n, k).direct_sum(lattice_A1()));
  // two sporadic forms
  out.push_back(gram3(-2, 3, 3, -2, 2, -2));
  out.push_back(gram3(-2, 3, 7, -2, 2, -2));
  return out;
}

std::vector<IntegerLattice> published_rank4_hyperbolic() {
  std::vector<IntegerLattice> out;
  out.push_back(
      lattice_U(6).direct_sum(lattice_A1()).direct_sum(lattice_A1()));
  {
    IMat g(4, 4);
    long m[4][4] = {{0, 4, 0, 0}, {4, -6, 1, 1}, {0, 1, -2, 0}, {0, 1, 0, -2}};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = m[i][j];
    out.emplace_back(g);
  }
  {
    IMat g(4, 4);
    long m[4][4] = {{0, 5, 0, 0}, {5, -6, 2, 2}, {0, 2, -2, 1}, {0, 2, 1, -2}};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = m[i][j];
    out.emplace_back(g);
  }
  return out;
}

std::vector<IntegerLattice> published_rank3_finite() { return {}; }
std::vector<IntegerLattice> published_rank4_finite() { return {}; }

std::shared_ptr<SymmetryOracle> builtin_oracle(int rank) {
  auto oracle = std::make_shared<SymmetryOracle>();
  if (rank == 3) {
    for (const auto& L : published_rank3_hyperbolic())
      oracle->add(L, OracleVerdict::HyperbolicElementary);
    for (const auto& L : published_rank3_finite())
      oracle->add(L, OracleVerdict::Finite);
  } else if (rank == 4) {
    for (const auto& L : published_rank4_hyperbolic())
      oracle->add(L, OracleVerdict::HyperbolicElementary);
    for (const auto& L : published_rank4_finite())
      oracle->add(L, OracleVerdict::Finite);
  }
  return oracle;
}

std::shared_ptr<SymmetryOracle> empty_oracle() {
  return std::make_shared<SymmetryOracle>();
}

}  // namespace hyperlat
