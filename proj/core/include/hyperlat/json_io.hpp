#pragma once

#include <map>
#include <string>

#include "hyperlat/classify.hpp"
#include "hyperlat/lattice.hpp"

namespace hyperlat {

std::string lattice_to_json(const IntegerLattice& L);
IntegerLattice lattice_from_json(const std::string& text);
IntegerLattice lattice_from_json_file(const std::string& path);

// Named forms: "U", "U(n)", "U(n,k)", "A1", "A2", "[m]", joined with '+'.
IntegerLattice lattice_from_expression(const std::string& expr);

struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  int threads = 1;
  std::map<std::string, std::size_t> counts;
  double wall_seconds = 0;
  std::string version = "hyperlat-0.1.0";
};
std::string manifest_to_json(const RunManifest& m);

/**
 * Stage persistence: one JSONL file per stage under the checkpoint
 * directory, one lattice per line. A leading meta line carries counters.
 */
class Checkpointer {
 public:
  Checkpointer() = default;
  Checkpointer(const std::string& dir, int rank, const Int& bound);

  bool enabled() const { return !dir_.empty(); }
  bool load_registry(const std::string& stage, ClassRegistry& reg) const;
  void save_registry(const std::string& stage, const ClassRegistry& reg,
                     const std::map<std::string, std::string>& meta) const;
  std::size_t meta_value(const std::string& stage, const std::string& key) const;
  void save_h3(const PipelineState& st) const;
  bool load_h3(PipelineState& st) const;

 private:
  std::string path_of(const std::string& stage) const;
  std::string dir_;
  std::string prefix_;
};

}  // namespace hyperlat
