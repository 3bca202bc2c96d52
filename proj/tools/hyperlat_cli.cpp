#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hyperlat/classify.hpp"
#include "hyperlat/genus.hpp"
#include "hyperlat/json_io.hpp"
#include "hyperlat/padic.hpp"
#include "hyperlat/spinor.hpp"

using namespace hyperlat;

namespace {

IntegerLattice load_lattice(const std::string& arg) {
  // file path or a named-form expression
  std::ifstream probe(arg);
  if (probe.good()) return lattice_from_json_file(arg);
  return lattice_from_expression(arg);
}

int cmd_info(const std::string& arg) {
  IntegerLattice L = load_lattice(arg);
  Signature s = signature(L);
  std::cout << "rank:      " << L.rank() << "\n";
  std::cout << "signature: (" << s.n_plus << "," << s.n_minus;
  if (s.n_zero) std::cout << "," << s.n_zero;
  std::cout << ")\n";
  std::cout << "even:      " << (L.is_even() ? "yes" : "no") << "\n";
  if (s.n_zero == 0) {
    std::cout << "det:       " << L.det().get_str() << "\n";
    std::cout << "disc:      " << L.disc().get_str() << "\n";
    std::cout << "genus:     " << genus_symbol_string(L) << "\n";
    std::cout << "hash:      " << genus_hash(L) << "\n";
    if (L.is_even()) {
      auto D = discriminant_form(L);
      std::cout << "disc group:";
      if (D.form.num_gens() == 0) std::cout << " trivial";
      for (const auto& d : D.form.orders())
        std::cout << " Z/" << d.get_str();
      std::cout << "\n";
    }
    if (s.hyperbolic())
      std::cout << "isotropic: " << (is_isotropic(L) ? "yes" : "no") << "\n";
  } else {
    std::cout << "degenerate: kernel rank " << s.n_zero << "\n";
  }
  return 0;
}

int cmd_iso(const std::string& a, const std::string& b) {
  IntegerLattice L1 = load_lattice(a);
  IntegerLattice L2 = load_lattice(b);
  auto v = is_isometric(L1, L2);
  const char* ev = "";
  switch (v.evidence) {
    case Evidence::Trivial: ev = "elementary invariants"; break;
    case Evidence::DifferentGenus: ev = "different genus"; break;
    case Evidence::SingleSpinorGenus: ev = "single spinor genus"; break;
    case Evidence::SpinorGenerator: ev = "spinor generator"; break;
    case Evidence::SpinorObstruction: ev = "spinor obstruction"; break;
    case Evidence::ExplicitMap: ev = "explicit map"; break;
  }
  std::cout << (v.isometric ? "isometric" : "not isometric") << " (" << ev;
  if (v.index != 0) std::cout << ", index " << v.index.get_str();
  std::cout << ")\n";
  return v.isometric ? 0 : 1;
}

int cmd_genus(const std::string& a) {
  IntegerLattice L = load_lattice(a);
  std::cout << genus_symbol_string(L) << "\n";
  return 0;
}

int cmd_debug_reflect(const std::string& file, long p, long t) {
  std::ifstream in(file);
  if (!in) {
    std::cerr << "cannot open " << file << "\n";
    return 2;
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  auto j = nlohmann::json::parse(text);
  IntegerLattice space = lattice_from_json(j["space"].dump());
  QMat f(space.rank(), space.rank());
  for (std::size_t i = 0; i < space.rank(); ++i)
    for (std::size_t c = 0; c < space.rank(); ++c) {
      auto& e = j["matrix"][i][c];
      f(i, c) = e.is_string() ? Rat(e.get<std::string>())
                              : Rat(Int(static_cast<long>(e.get<long long>())));
    }
  auto chain = reflection_decomposition(to_rat(space.gram()), f, Int(p), t);
  if (!chain) {
    std::cout << "insufficient precision\n";
    return 1;
  }
  for (const auto& x : chain->vectors) {
    for (const auto& e : x) std::cout << e.get_str() << " ";
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"integral quadratic lattice toolkit"};
  app.require_subcommand(1);

  std::string file_a, file_b;
  auto* info = app.add_subcommand("info", "invariants of a lattice");
  info->add_option("lattice", file_a, "JSON file or named form")->required();

  auto* iso = app.add_subcommand("iso", "decide isometry of two lattices");
  iso->add_option("first", file_a)->required();
  iso->add_option("second", file_b)->required();

  auto* genus = app.add_subcommand("genus", "print the genus symbol");
  genus->add_option("lattice", file_a)->required();

  int rank = 3;
  std::string stage = "full";
  std::string oracle_arg = "builtin";
  std::string ckdir;
  int threads = 1;
  std::uint64_t seed = 0;
  long bound = 18;
  auto* classify = app.add_subcommand("classify", "run the classification");
  classify->add_option("--rank", rank, "3 or 4")->required();
  classify->add_option("--stage", stage, "h1|m|full");
  classify->add_option("--oracle", oracle_arg, "builtin|none|<jsonl path>");
  classify->add_option("--checkpoint-dir", ckdir, "stage checkpoint directory");
  classify->add_option("--threads", threads, "worker threads");
  classify->add_option("--seed", seed, "randomness seed");
  classify->add_option("--bound", bound, "entry bound (18 = published run)");

  int vrank = 3;
  auto* verify = app.add_subcommand("verify", "check the published tables");
  verify->add_option("--rank", vrank, "3 or 4")->required();

  std::string rfile;
  long rp = 2, rt = 6;
  auto* dreflect = app.add_subcommand("debug-reflect", "dump a reflection chain");
  dreflect->add_option("file", rfile, "JSON with space + matrix")->required();
  dreflect->add_option("--prime", rp);
  dreflect->add_option("--precision", rt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*info) return cmd_info(file_a);
    if (*iso) return cmd_iso(file_a, file_b);
    if (*genus) return cmd_genus(file_a);
    if (*dreflect) return cmd_debug_reflect(rfile, rp, rt);
    if (*verify) {
      auto rep = verify_published(vrank);
      for (const auto& l : rep.lines) std::cout << l << "\n";
      std::cout << (rep.pass ? "PASS" : "FAIL") << "\n";
      return rep.pass ? 0 : 1;
    }
    if (*classify) {
      if (ckdir.empty()) {
        const char* env = std::getenv("HYPERLAT_CHECKPOINT_DIR");
        if (env) ckdir = env;
      }
      auto t0 = std::chrono::steady_clock::now();
      PipelineOptions opt;
      opt.rank = rank;
      opt.entry_bound = bound;
      opt.threads = threads;
      opt.seed = seed;
      opt.checkpoint_dir = ckdir;
      if (oracle_arg == "builtin")
        opt.oracle = builtin_oracle(rank);
      else if (oracle_arg == "none")
        opt.oracle = empty_oracle();
      else {
        auto oracle = std::make_shared<SymmetryOracle>();
        std::ifstream in(oracle_arg);
        if (!in) {
          std::cerr << "cannot open oracle file " << oracle_arg << "\n";
          return 2;
        }
        std::string line;
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          auto j = nlohmann::json::parse(line);
          oracle->add(lattice_from_json(line),
                      oracle_verdict_from_string(j.value("verdict", "unknown")));
        }
        opt.oracle = oracle;
      }
      opt.log = [](const std::string& s) { std::cout << s << std::endl; };
      PipelineState r3state;
      if (rank == 4) {
        // rank-3 classification feeds the rank-4 sublattice test
        PipelineOptions o3 = opt;
        o3.rank = 3;
        o3.entry_bound = 18;
        o3.oracle = builtin_oracle(3);
        Checkpointer ck3(ckdir, 3, Int(18));
        if (!ck3.load_h3(r3state)) r3state = run_pipeline(o3);
        opt.rank3_result = &r3state;
      }
      if (stage == "h1") {
        H1Options ho;
        ho.rank = rank;
        ho.entry_bound = bound;
        ho.threads = threads;
        auto r = generate_H1(ho);
        std::cout << r.classes.size() << " classes from " << r.raw_count
                  << " matrices (" << r.hyperbolic_count << " hyperbolic)\n";
        return 0;
      }
      auto st = run_pipeline(opt);
      if (stage == "m") {
        std::cout << st.counts.m1 << " / " << st.counts.m2 << " / "
                  << st.counts.m3 << "\n";
      } else {
        std::cout << "H1 " << st.counts.h1 << " (raw " << st.counts.h1_raw
                  << "), M " << st.counts.m1 << "/" << st.counts.m2 << "/"
                  << st.counts.m3 << ", H2 " << st.counts.h2 << ", discards "
                  << st.counts.discard_overlattice << "/"
                  << st.counts.discard_cusp << "/"
                  << st.counts.discard_sublattice << "/"
                  << st.counts.needs_oracle << " (needs-oracle), H3 "
                  << st.counts.h3 << " = " << st.counts.h3_finite
                  << " finite + " << st.counts.h3_hyperbolic << " hyperbolic\n";
        for (const auto& L : st.needs_oracle_report)
          std::cout << "needs-oracle: " << lattice_to_json(L) << "\n";
      }
      auto t1 = std::chrono::steady_clock::now();
      RunManifest man;
      man.command = "classify";
      man.seed = seed;
      man.threads = threads;
      man.counts["h1"] = st.counts.h1;
      man.counts["m1"] = st.counts.m1;
      man.counts["m2"] = st.counts.m2;
      man.counts["m3"] = st.counts.m3;
      man.counts["h2"] = st.counts.h2;
      man.counts["h3"] = st.counts.h3;
      man.wall_seconds =
          std::chrono::duration<double>(t1 - t0).count();
      if (!ckdir.empty()) {
        std::ofstream mf(ckdir + "/manifest_rank" + std::to_string(rank) +
                         ".json");
        mf << manifest_to_json(man) << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
