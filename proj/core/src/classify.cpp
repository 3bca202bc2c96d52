#include "hyperlat/classify.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <thread>

#include "hyperlat/binary_forms.hpp"
#include "hyperlat/disc_form.hpp"
#include "hyperlat/json_io.hpp"
#include "hyperlat/spinor.hpp"

namespace hyperlat {

std::string to_string(OracleVerdict v) {
  switch (v) {
    case OracleVerdict::Finite: return "finite";
    case OracleVerdict::ParabolicElementary: return "parabolic";
    case OracleVerdict::HyperbolicElementary: return "hyperbolic";
    case OracleVerdict::NotElementary: return "not-elementary";
    case OracleVerdict::Unknown: return "unknown";
  }
  return "unknown";
}

OracleVerdict oracle_verdict_from_string(const std::string& s) {
  if (s == "finite") return OracleVerdict::Finite;
  if (s == "parabolic") return OracleVerdict::ParabolicElementary;
  if (s == "hyperbolic") return OracleVerdict::HyperbolicElementary;
  if (s == "not-elementary") return OracleVerdict::NotElementary;
  return OracleVerdict::Unknown;
}

void SymmetryOracle::add(const IntegerLattice& L, OracleVerdict v) {
  auto r = registry_.insert(L);
  if (r.was_new)
    verdicts_.push_back(v);
  else if (verdicts_[r.index] != v)
    throw std::invalid_argument("SymmetryOracle: conflicting verdicts");
}

OracleVerdict SymmetryOracle::classify(const IntegerLattice& L) const {
  auto idx = registry_.find(L);
  if (!idx) return OracleVerdict::Unknown;
  return verdicts_[*idx];
}

Rank2Verdict rank2_oracle(const IntegerLattice& M) {
  if (M.rank() != 2 || !signature(M).hyperbolic())
    throw std::invalid_argument("rank2_oracle: need a rank-2 hyperbolic lattice");
  bool flag = binary_represents(M, 0) || binary_represents(M, -2);
  return {flag ? OracleVerdict::HyperbolicElementary : OracleVerdict::Finite,
          flag};
}

bool cusp_test(const IntegerLattice& L) {
  Signature s = signature(L);
  if (!s.hyperbolic()) throw std::invalid_argument("cusp_test: not hyperbolic");
  if (!is_isotropic(L)) return true;
  auto v = isotropic_vector(L);
  if (!v) throw std::logic_error("cusp_test: isotropy witness missing");
  IntegerLattice M = orthogonal_quotient(L, *v);
  IntegerLattice R = root_sublattice(M);
  return R.rank() >= L.rank() - 2;
}

bool sublattice_test(const IntegerLattice& L, const SubOracle& oracle) {
  const std::size_t n = L.rank();
  Signature sig = signature(L);
  if (!sig.hyperbolic())
    throw std::invalid_argument("sublattice_test: not hyperbolic");
  std::vector<IntegerLattice> found_rank2;  // n = 3 collection
  IntegerLattice Lneg = L.rescaled(-1);
  DiscriminantForm DN = discriminant_form(Lneg);
  Signature target{1, static_cast<int>(n) - 2, 0};
  for (const Int& k : divisors(L.disc())) {
    for (Int g = 1; 2 * g <= k; ++g) {
      if (fdiv_r(g * k, 2) != 0) continue;
      // cyclic glue: A_{[-gk]} = Z/gk; its order-k subgroup is generated by
      // g * w with q = -g/k mod 2Z. Anti-isometric images y in A_N need
      // order k and q(y) = +g/k mod 2Z.
      IntegerLattice anchor = lattice_rank1(-g * k);
      DiscriminantForm DM = discriminant_form(anchor);
      if (DM.form.num_gens() != 1) throw std::logic_error("sublattice_test: anchor");
      IVec x0{g};
      Rat qx = DM.form.q_of(x0);
      Rat want = qx == 0 ? Rat(0) : Rat(4) - qx;  // -q mod 2Z, q in [0,2)
      if (want >= 2) want -= 2;
      std::vector<IVec> images;
      DN.form.for_each_element([&](const IVec& y) {
        if (DN.form.order_of(y) != k) return;
        if (DN.form.q_of(y) != want) return;
        images.push_back(y);
      });
      if (k == 1) images.assign(1, IVec(DN.form.num_gens(), Int(0)));
      for (const IVec& y : images) {
        // glue [-gk] + L(-1) along x0 -> y
        IntegerLattice sum = anchor.direct_sum(Lneg);
        QMat extra(1, 1 + n);
        {
          // lift of x0 in anchor-coordinates
          for (std::size_t c = 0; c < 1; ++c) {
            Rat acc(0);
            acc += Rat(x0[0]) * DM.generators(0, c);
            extra(0, c) = acc;
          }
          for (std::size_t c = 0; c < n; ++c) {
            Rat acc(0);
            for (std::size_t i = 0; i < DN.form.num_gens(); ++i)
              if (y[i] != 0) acc += Rat(y[i]) * DN.generators(i, c);
            extra(0, 1 + c) = acc;
          }
        }
        IntegerLattice G;
        QMat gbasis;
        try {
          auto res = overlattice_from_generators(sum, extra);
          if (lattice_index(res.basis, QMat::identity(1 + n)) != k) continue;
          G = res.lattice;
          gbasis = res.basis;
        } catch (const std::domain_error&) {
          continue;  // glue not even/integral
        }
        FiniteQuadraticForm D = discriminant_form(G).form.negated();
        if (!exists_even_lattice(target, D)) continue;
        IntegerLattice M = lattice_with_invariants(target, D);
        // glue M + G to a unimodular lattice along a full anti-isometry
        DiscriminantForm DMM = discriminant_form(M);
        DiscriminantForm DG = discriminant_form(G);
        auto gammas = DMM.form.all_isometries(DG.form, -1, /*first_only=*/true);
        if (gammas.empty())
          throw std::logic_error("sublattice_test: no unimodular glue");
        const IMat& gamma = gammas[0];
        const std::size_t rm = M.rank(), rg = G.rank();
        IntegerLattice big = M.direct_sum(G);
        QMat rows(DMM.form.num_gens(), rm + rg);
        for (std::size_t r = 0; r < DMM.form.num_gens(); ++r) {
          for (std::size_t c = 0; c < rm; ++c) rows(r, c) = DMM.generators(r, c);
          IVec img = gamma.row(r);
          for (std::size_t c = 0; c < rg; ++c) {
            Rat acc(0);
            for (std::size_t i = 0; i < DG.form.num_gens(); ++i)
              if (img[i] != 0) acc += Rat(img[i]) * DG.generators(i, c);
            rows(r, rm + c) = acc;
          }
        }
        auto lam = overlattice_from_generators(big, rows);
        if (abs(lam.lattice.det()) != 1)
          throw std::logic_error("sublattice_test: glue not unimodular");
        // locate L(-1) inside Lambda and take its complement
        QMat g_in_mg = inverse(gbasis);  // rows of (anchor + L(-1)) in G-coords
        QMat lam_inv = inverse(lam.basis);
        IMat lneg_rows(n, rm + rg);
        for (std::size_t i = 0; i < n; ++i) {
          // row (1 + i) of g_in_mg gives L(-1) basis vector i in G-coords
          QVec in_mg(rm + rg, Rat(0));
          for (std::size_t c = 0; c < rg; ++c) in_mg[rm + c] = g_in_mg(1 + i, c);
          QVec in_lam = mat_vec(lam_inv.transposed(), in_mg);
          for (std::size_t c = 0; c < rm + rg; ++c) {
            if (in_lam[c].get_den() != 1)
              throw std::logic_error("sublattice_test: L(-1) not in Lambda");
            lneg_rows(i, c) = in_lam[c].get_num();
          }
        }
        auto comp = orthogonal_complement(lam.lattice, lneg_rows);
        IntegerLattice Lprime = comp.lattice;
        if (!is_isometric(L, Lprime).isometric) continue;
        OracleVerdict v = oracle(M);
        if (v == OracleVerdict::Unknown)
          throw std::logic_error("sublattice_test: sub-oracle returned unknown");
        if (!finite_or_hyperbolic(v)) return false;
        if (n == 3) {
          if (!binary_represents(M, 0) && !binary_represents(M, -2)) {
            bool known = false;
            for (const auto& prev : found_rank2)
              if (is_isometric(prev, M).isometric) {
                known = true;
                break;
              }
            if (!known) found_rank2.push_back(M);
            if (found_rank2.size() == 2) return false;
          }
        }
      }
    }
  }
  return true;
}

namespace {

// int64 fast path: exact hyperbolicity test for small Gram matrices
bool hyperbolic_i64(const long (&g)[4][4], int n) {
  // characteristic polynomial via Faddeev-LeVerrier
  long long acc[4][4] = {};
  long long m[4][4];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m[i][j] = g[i][j];
      acc[i][j] = (i == j) ? 1 : 0;
    }
  long long c[5] = {};
  c[n] = 1;
  long long work[4][4];
  for (int k = 1; k <= n; ++k) {
    // acc <- m * acc
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        long long s = 0;
        for (int t = 0; t < n; ++t) s += m[i][t] * acc[t][j];
        work[i][j] = s;
      }
    long long tr = 0;
    for (int i = 0; i < n; ++i) tr += work[i][i];
    long long ck = -tr / k;
    c[n - k] = ck;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc[i][j] = work[i][j] + (i == j ? ck : 0);
  }
  if (c[0] == 0) return false;  // degenerate
  // Descartes: count positive roots (all roots real)
  int var = 0, last = 0;
  for (int i = n; i >= 0; --i) {
    if (c[i] == 0) continue;
    int sg = c[i] > 0 ? 1 : -1;
    if (last != 0 && sg != last) ++var;
    last = sg;
  }
  return var == 1;
}

}  // namespace

H1Result generate_H1(const H1Options& opt) {
  H1Result out;
  const long B = opt.entry_bound.get_si();
  std::vector<std::array<long, 6>> tuples;
  if (opt.rank == 3) {
    for (long a = -1; a <= std::min(2L, B); ++a)
      for (long b = -1; b <= B; ++b)
        for (long c = b; c <= B; ++c) tuples.push_back({a, b, c, 0, 0, 0});
  } else if (opt.rank == 4) {
    for (long a = -1; a <= std::min(2L, B); ++a)
      for (long b = -1; b <= B; ++b)
        for (long c = b; c <= B; ++c)
          for (long d = c; d <= B; ++d)
            for (long e = b; e <= B; ++e)
              for (long f = b; f <= B; ++f)
                tuples.push_back({a, b, c, d, e, f});
  } else {
    throw std::invalid_argument("generate_H1: rank must be 3 or 4");
  }
  out.raw_count = tuples.size();
  // parallel phase: hyperbolicity screen + genus hash
  const int threads = std::max(1, opt.threads);
  std::vector<std::vector<std::pair<std::size_t, std::string>>> results(threads);
  std::atomic<std::size_t> cursor{0};
  auto worker = [&](int tid) {
    auto& local = results[tid];
    for (;;) {
      std::size_t i = cursor.fetch_add(256);
      if (i >= tuples.size()) break;
      std::size_t end = std::min(tuples.size(), i + 256);
      for (std::size_t t = i; t < end; ++t) {
        const auto& q = tuples[t];
        long g[4][4] = {};
        int n = opt.rank;
        if (n == 3) {
          long m[3][3] = {{-2, q[0], q[1]}, {q[0], -2, q[2]}, {q[1], q[2], -2}};
          for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) g[r][c] = m[r][c];
        } else {
          long m[4][4] = {{-2, q[0], q[1], q[2]},
                          {q[0], -2, q[3], q[4]},
                          {q[1], q[3], -2, q[5]},
                          {q[2], q[4], q[5], -2}};
          for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) g[r][c] = m[r][c];
        }
        if (!hyperbolic_i64(g, n)) continue;
        IMat gm(n, n);
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c) gm(r, c) = g[r][c];
        IntegerLattice L(gm);
        local.emplace_back(t, genus_hash(L));
      }
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  // merge in deterministic order
  std::vector<std::pair<std::size_t, std::string>> all;
  for (auto& r : results)
    for (auto& pr : r) all.push_back(std::move(pr));
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  out.hyperbolic_count = all.size();
  for (const auto& [idx, hash] : all) {
    const auto& q = tuples[idx];
    int n = opt.rank;
    IMat gm(n, n);
    if (n == 3) {
      long m[3][3] = {{-2, q[0], q[1]}, {q[0], -2, q[2]}, {q[1], q[2], -2}};
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) gm(r, c) = m[r][c];
    } else {
      long m[4][4] = {{-2, q[0], q[1], q[2]},
                      {q[0], -2, q[3], q[4]},
                      {q[1], q[3], -2, q[5]},
                      {q[2], q[4], q[5], -2}};
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) gm(r, c) = m[r][c];
    }
    out.classes.insert(IntegerLattice(gm), hash);
  }
  return out;
}

namespace {

bool is_maximal_even(const IntegerLattice& L) {
  if (L.disc() == 1) return true;
  for (const Int& p : prime_divisors(L.disc()))
    if (!even_overlattices(L, p).empty()) return false;
  return true;
}

}  // namespace

PipelineState run_pipeline(const PipelineOptions& opt) {
  auto log = [&](const std::string& s) {
    if (opt.log) opt.log(s);
  };
  std::shared_ptr<SymmetryOracle> oracle =
      opt.oracle ? opt.oracle : builtin_oracle(opt.rank);
  PipelineState st;
  Checkpointer ck(opt.checkpoint_dir, opt.rank, opt.entry_bound);

  // ---- H1
  H1Options h1o;
  h1o.rank = opt.rank;
  h1o.entry_bound = opt.entry_bound;
  h1o.threads = opt.threads;
  ClassRegistry h1;
  if (!ck.load_registry("h1", h1)) {
    H1Result r = generate_H1(h1o);
    h1 = std::move(r.classes);
    st.counts.h1_raw = r.raw_count;
    ck.save_registry("h1", h1, {{"raw", std::to_string(r.raw_count)}});
  } else {
    st.counts.h1_raw = ck.meta_value("h1", "raw");
  }
  st.counts.h1 = h1.size();
  log("H1 classes: " + std::to_string(st.counts.h1) + " (raw " +
      std::to_string(st.counts.h1_raw) + ")");

  // ---- M1: all maximal even overlattices of H1 classes
  ClassRegistry m1;
  if (!ck.load_registry("m1", m1)) {
    for (std::size_t i = 0; i < h1.size(); ++i) {
      for (auto& mx : all_maximal_even_overlattices(h1.representative(i)))
        m1.insert(mx.lattice);
    }
    ck.save_registry("m1", m1, {});
  }
  st.counts.m1 = m1.size();
  log("M1 classes: " + std::to_string(st.counts.m1));

  // ---- M2: cusp + sublattice tests
  SubOracle sub_oracle;
  if (opt.rank == 3) {
    sub_oracle = [](const IntegerLattice& M) {
      return rank2_oracle(M).verdict;
    };
  } else {
    if (!opt.rank3_result)
      throw std::invalid_argument("run_pipeline: rank-4 needs the rank-3 result");
    const PipelineState* r3 = opt.rank3_result;
    sub_oracle = [r3](const IntegerLattice& M) {
      auto idx = r3->h3.find(M);
      if (!idx) return OracleVerdict::NotElementary;
      return r3->h3_verdicts[*idx];
    };
  }
  ClassRegistry m2;
  if (!ck.load_registry("m2", m2)) {
    for (std::size_t i = 0; i < m1.size(); ++i) {
      const IntegerLattice& M = m1.representative(i);
      if (!cusp_test(M)) continue;
      if (!sublattice_test(M, sub_oracle)) continue;
      m2.insert(M, m1.hash_of(i));
    }
    ck.save_registry("m2", m2, {});
  }
  st.counts.m2 = m2.size();
  log("M2 classes: " + std::to_string(st.counts.m2));

  // ---- M3: oracle stage on the maximal classes
  ClassRegistry m3;
  std::vector<OracleVerdict> m3_verdicts;
  for (std::size_t i = 0; i < m2.size(); ++i) {
    const IntegerLattice& M = m2.representative(i);
    OracleVerdict v = oracle->classify(M);
    if (finite_or_hyperbolic(v)) {
      m3.insert(M, m2.hash_of(i));
      m3_verdicts.push_back(v);
    } else if (v == OracleVerdict::Unknown) {
      ++st.counts.m_needs_oracle;
      st.needs_oracle_report.push_back(M);
    }
  }
  st.counts.m3 = m3.size();
  log("M3 classes: " + std::to_string(st.counts.m3) + " (needs-oracle " +
      std::to_string(st.counts.m_needs_oracle) + ")");

  // ---- H2: lattices between H1 members and their maximal overlattices in M3
  ClassRegistry h2;
  std::vector<std::size_t> h2_disc_order;
  if (!ck.load_registry("h2", h2)) {
    for (std::size_t i = 0; i < h1.size(); ++i) {
      const IntegerLattice& L = h1.representative(i);
      for (auto& ol : all_even_overlattices(L)) {
        bool under_m3 = false;
        for (auto& mx : all_maximal_even_overlattices(ol.lattice)) {
          if (m3.find(mx.lattice)) {
            under_m3 = true;
            break;
          }
        }
        if (under_m3) h2.insert(ol.lattice);
      }
    }
    ck.save_registry("h2", h2, {});
  }
  st.counts.h2 = h2.size();
  log("H2 classes: " + std::to_string(st.counts.h2));

  // sort H2 ascending by disc (stable secondary: genus hash), drop maximal
  std::vector<std::size_t> order(h2.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    Int da = h2.representative(a).disc(), db = h2.representative(b).disc();
    if (da != db) return da < db;
    return h2.hash_of(a) < h2.hash_of(b);
  });

  // ---- H3 loop
  ClassRegistry h3;
  std::vector<OracleVerdict> h3_verdicts;
  for (std::size_t i = 0; i < m3.size(); ++i) {
    h3.insert(m3.representative(i), m3.hash_of(i));
    h3_verdicts.push_back(m3_verdicts[i]);
  }
  for (std::size_t oi : order) {
    const IntegerLattice& L = h2.representative(oi);
    if (is_maximal_even(L)) continue;  // removed from the sorted list
    ++st.counts.h2_nonmaximal;
    // overlattice test
    bool discarded = false;
    for (const Int& p : prime_divisors(L.disc())) {
      if (!divides(p * p, L.disc())) continue;
      auto ols = even_overlattices(L, p);
      if (ols.empty()) continue;
      if (!h3.find(ols.front().lattice)) {
        discarded = true;
        break;
      }
    }
    if (discarded) {
      ++st.counts.discard_overlattice;
      continue;
    }
    if (!cusp_test(L)) {
      ++st.counts.discard_cusp;
      continue;
    }
    if (!sublattice_test(L, sub_oracle)) {
      ++st.counts.discard_sublattice;
      continue;
    }
    OracleVerdict v = oracle->classify(L);
    if (finite_or_hyperbolic(v)) {
      h3.insert(L, h2.hash_of(oi));
      h3_verdicts.push_back(v);
    } else if (v == OracleVerdict::Unknown) {
      ++st.counts.needs_oracle;
      st.needs_oracle_report.push_back(L);
    } else {
      ++st.counts.discard_oracle;
    }
  }
  st.counts.h3 = h3.size();
  for (auto v : h3_verdicts) {
    if (v == OracleVerdict::Finite) ++st.counts.h3_finite;
    if (v == OracleVerdict::HyperbolicElementary) ++st.counts.h3_hyperbolic;
  }
  st.h3 = std::move(h3);
  st.h3_verdicts = std::move(h3_verdicts);
  ck.save_h3(st);
  log("H3 classes: " + std::to_string(st.counts.h3) + " (" +
      std::to_string(st.counts.h3_finite) + " finite, " +
      std::to_string(st.counts.h3_hyperbolic) + " hyperbolic)");
  return st;
}

VerifyReport verify_published(int rank) {
  VerifyReport rep;
  rep.pass = true;
  auto fail = [&](const std::string& s) {
    rep.pass = false;
    rep.lines.push_back("FAIL: " + s);
  };
  auto ok = [&](const std::string& s) { rep.lines.push_back("ok: " + s); };
  std::vector<IntegerLattice> table = rank == 3 ? published_rank3_hyperbolic()
                                                : published_rank4_hyperbolic();
  // pairwise non-isometric
  bool pairwise = true;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = i + 1; j < table.size(); ++j)
      if (is_isometric(table[i], table[j]).isometric) {
        pairwise = false;
        fail("tables: lattices " + std::to_string(i) + " and " +
             std::to_string(j) + " are isometric");
      }
  if (pairwise)
    ok("all " + std::to_string(table.size()) + " lattices pairwise non-isometric");
  if (rank == 4) {
    std::vector<Int> expected{144, 64, 75};
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table[i].disc() != expected[i])
        fail("rank-4 discriminant " + std::to_string(i));
    }
    ok("rank-4 discriminants are {144, 64, 75}");
  }
  if (rank == 3) {
    // isotropy count and the square criterion
    int isotropic_count = 0;
    for (const auto& L : table) {
      bool iso = is_isotropic(L);
      bool square = is_perfect_square(2 * L.disc());
      if (iso != square) fail("isotropy/square mismatch at disc " + L.disc().get_str());
      if (iso) ++isotropic_count;
    }
    if (isotropic_count == 20)
      ok("exactly 20 of 45 are isotropic, matching the square criterion");
    else
      fail("isotropic count " + std::to_string(isotropic_count) + " != 20");
  }
  // every table lattice passes the cusp test
  for (const auto& L : table)
    if (!cusp_test(L)) fail("cusp test fails on a table lattice");
  ok("cusp test passes on every table lattice");
  if (rank == 3) {
    SubOracle sub = [](const IntegerLattice& M) { return rank2_oracle(M).verdict; };
    for (const auto& L : table)
      if (!sublattice_test(L, sub)) fail("sublattice test fails on a table lattice");
    ok("sublattice test passes on every table lattice");
  }
  return rep;
}

}  // namespace hyperlat
