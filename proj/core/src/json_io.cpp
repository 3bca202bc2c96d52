#include "hyperlat/json_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hyperlat {

using nlohmann::json;

namespace {

json gram_to_json(const IMat& g) {
  json rows = json::array();
  for (std::size_t i = 0; i < g.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < g.cols(); ++j) row.push_back(g(i, j).get_str());
    rows.push_back(row);
  }
  return rows;
}

IMat gram_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty())
    throw std::invalid_argument("gram: expected a non-empty array of rows");
  std::size_t n = rows.size();
  IMat g(n, rows[0].size());
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != g.cols())
      throw std::invalid_argument("gram: ragged rows");
    for (std::size_t j = 0; j < g.cols(); ++j) {
      const auto& e = rows[i][j];
      if (e.is_number_integer())
        g(i, j) = Int(static_cast<long>(e.get<long long>()));
      else if (e.is_string())
        g(i, j) = Int(e.get<std::string>());
      else
        throw std::invalid_argument("gram: entries must be integers");
    }
  }
  return g;
}

}  // namespace

std::string lattice_to_json(const IntegerLattice& L) {
  json j;
  j["gram"] = gram_to_json(L.gram());
  if (!L.name().empty()) j["name"] = L.name();
  return j.dump();
}

IntegerLattice lattice_from_json(const std::string& text) {
  json j = json::parse(text);
  if (!j.contains("gram")) throw std::invalid_argument("lattice: missing gram");
  IMat g = gram_from_json(j["gram"]);
  std::string name = j.value("name", "");
  return IntegerLattice(g, name);
}

IntegerLattice lattice_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return lattice_from_json(ss.str());
}

IntegerLattice lattice_from_expression(const std::string& expr) {
  std::vector<IntegerLattice> parts;
  std::string cur;
  auto flush = [&]() {
    std::string t;
    for (char c : cur)
      if (!isspace(static_cast<unsigned char>(c))) t += c;
    cur.clear();
    if (t.empty()) return;
    if (t == "A1") {
      parts.push_back(lattice_A1());
    } else if (t == "A2") {
      parts.push_back(lattice_A2());
    } else if (t == "U") {
      parts.push_back(lattice_U());
    } else if (t.rfind("U(", 0) == 0 && t.back() == ')') {
      std::string inner = t.substr(2, t.size() - 3);
      auto comma = inner.find(',');
      if (comma == std::string::npos) {
        parts.push_back(lattice_U(Int(inner)));
      } else {
        parts.push_back(
            lattice_U(Int(inner.substr(0, comma)), Int(inner.substr(comma + 1))));
      }
    } else if (t.front() == '[' && t.back() == ']') {
      parts.push_back(lattice_rank1(Int(t.substr(1, t.size() - 2))));
    } else {
      throw std::invalid_argument("unknown lattice term: " + t);
    }
  };
  int depth = 0;
  for (char c : expr) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == '+' && depth == 0) {
      flush();
      continue;
    }
    cur += c;
  }
  flush();
  if (parts.empty()) throw std::invalid_argument("empty lattice expression");
  IntegerLattice out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out = out.direct_sum(parts[i]);
  return out;
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["threads"] = m.threads;
  j["wall_seconds"] = m.wall_seconds;
  j["version"] = m.version;
  json c;
  for (auto& [k, v] : m.counts) c[k] = v;
  j["counts"] = c;
  return j.dump(2);
}

Checkpointer::Checkpointer(const std::string& dir, int rank, const Int& bound)
    : dir_(dir) {
  if (dir_.empty()) return;
  std::filesystem::create_directories(dir_);
  prefix_ = "rank" + std::to_string(rank) + "_bound" + bound.get_str() + "_";
}

std::string Checkpointer::path_of(const std::string& stage) const {
  return dir_ + "/" + prefix_ + stage + ".jsonl";
}

bool Checkpointer::load_registry(const std::string& stage,
                                 ClassRegistry& reg) const {
  if (!enabled()) return false;
  std::ifstream in(path_of(stage));
  if (!in) return false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (j.contains("_meta")) continue;
    IMat g = gram_from_json(j["gram"]);
    if (j.contains("hash"))
      reg.insert(IntegerLattice(g), j["hash"].get<std::string>());
    else
      reg.insert(IntegerLattice(g));
  }
  return true;
}

void Checkpointer::save_registry(
    const std::string& stage, const ClassRegistry& reg,
    const std::map<std::string, std::string>& meta) const {
  if (!enabled()) return;
  std::ofstream out(path_of(stage));
  if (!meta.empty()) {
    json m;
    for (auto& [k, v] : meta) m["_meta"][k] = v;
    out << m.dump() << "\n";
  }
  for (std::size_t i = 0; i < reg.size(); ++i) {
    json j;
    j["gram"] = gram_to_json(reg.representative(i).gram());
    j["hash"] = reg.hash_of(i);
    out << j.dump() << "\n";
  }
}

std::size_t Checkpointer::meta_value(const std::string& stage,
                                     const std::string& key) const {
  if (!enabled()) return 0;
  std::ifstream in(path_of(stage));
  if (!in) return 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (j.contains("_meta") && j["_meta"].contains(key))
      return std::stoull(j["_meta"][key].get<std::string>());
    break;
  }
  return 0;
}

void Checkpointer::save_h3(const PipelineState& st) const {
  if (!enabled()) return;
  std::ofstream out(path_of("h3"));
  for (std::size_t i = 0; i < st.h3.size(); ++i) {
    json j;
    j["gram"] = gram_to_json(st.h3.representative(i).gram());
    j["hash"] = st.h3.hash_of(i);
    j["verdict"] = to_string(st.h3_verdicts[i]);
    out << j.dump() << "\n";
  }
  std::ofstream rep(dir_ + "/" + prefix_ + "needs_oracle.jsonl");
  for (const auto& L : st.needs_oracle_report) {
    json j;
    j["gram"] = gram_to_json(L.gram());
    rep << j.dump() << "\n";
  }
}

bool Checkpointer::load_h3(PipelineState& st) const {
  if (!enabled()) return false;
  std::ifstream in(path_of("h3"));
  if (!in) return false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (j.contains("_meta")) continue;
    IMat g = gram_from_json(j["gram"]);
    auto r = st.h3.insert(IntegerLattice(g), j["hash"].get<std::string>());
    if (r.was_new)
      st.h3_verdicts.push_back(
          oracle_verdict_from_string(j["verdict"].get<std::string>()));
  }
  return st.h3.size() > 0;
}

}  // namespace hyperlat
