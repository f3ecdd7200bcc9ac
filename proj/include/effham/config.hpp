#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "effham/effective.hpp"
#include "effham/hamiltonian.hpp"
#include "effham/lf_solver.hpp"
#include "effham/potential.hpp"

namespace effham {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Run description: which Hamiltonian/potential family, scales, grids,
/// solver settings and pipelines to execute.
struct RunConfig {
  HamiltonianSpec hamiltonian;
  PotentialSpec potential;          // scale field is overridden per run by `scales`
  std::vector<double> scales{0.0};  // S values
  TorusGrid grid{1, 401};
  PGrid pgrid{1, 41};
  SolverConfig solver;
  std::set<std::string> pipelines{"direct"};
  std::vector<double> lambdas{0.1, 0.05, 0.025};
  std::vector<double> discount_p{0.0};
  std::string out_dir = "out";
  std::uint64_t config_hash = 0;
  std::string source_text;

  PotentialSpec potential_at(double S) const {
    PotentialSpec v = potential;
    v.scale = S;
    return v;
  }
};

namespace detail {

struct IniLine {
  std::string section, key, value;
  int line_no = 0;
};

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<IniLine> parse_ini(const std::string& text) {
  std::vector<IniLine> out;
  std::istringstream in(text);
  std::string line, section;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(no) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(no) + ": expected key = value");
    IniLine l;
    l.section = section;
    l.key = trim(line.substr(0, eq));
    l.value = trim(line.substr(eq + 1));
    l.line_no = no;
    if (l.key.empty()) throw ConfigError("config line " + std::to_string(no) + ": empty key");
    out.push_back(std::move(l));
  }
  return out;
}

inline double to_double(const IniLine& l) {
  try {
    std::size_t used = 0;
    double v = std::stod(l.value, &used);
    if (used != l.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config line " + std::to_string(l.line_no) + ": key '" + l.key +
                      "' expects a real number, got '" + l.value + "'");
  }
}

inline int to_int(const IniLine& l) {
  try {
    std::size_t used = 0;
    int v = std::stoi(l.value, &used);
    if (used != l.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config line " + std::to_string(l.line_no) + ": key '" + l.key +
                      "' expects an integer, got '" + l.value + "'");
  }
}

inline bool to_bool(const IniLine& l) {
  if (l.value == "true" || l.value == "1") return true;
  if (l.value == "false" || l.value == "0") return false;
  throw ConfigError("config line " + std::to_string(l.line_no) + ": key '" + l.key + "' expects true/false");
}

inline std::vector<double> to_double_list(const IniLine& l) {
  std::vector<double> out;
  std::istringstream in(l.value);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    cell = trim(cell);
    if (cell.empty()) continue;
    try {
      out.push_back(std::stod(cell));
    } catch (...) {
      throw ConfigError("config line " + std::to_string(l.line_no) + ": key '" + l.key +
                        "' expects a comma-separated list of reals");
    }
  }
  if (out.empty())
    throw ConfigError("config line " + std::to_string(l.line_no) + ": key '" + l.key + "' is an empty list");
  return out;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/// Parses the structured key-value config text. Unknown keys and malformed
/// values are rejected with the offending line; dimensions are
/// cross-checked across sections.
inline RunConfig parse_config(const std::string& text) {
  using detail::IniLine;
  RunConfig rc;
  rc.source_text = text;
  rc.config_hash = detail::fnv1a(text);

  const std::set<std::string> known_sections{"hamiltonian", "potential", "grid", "pgrid", "solver", "run"};
  static const std::map<std::string, std::set<std::string>> known_keys{
      {"hamiltonian", {"preset", "kind", "knots", "tail_slope", "offset", "dimension"}},
      {"potential", {"kind", "c0", "s", "value"}},
      {"grid", {"n"}},
      {"pgrid", {"samples", "range"}},
      {"solver",
       {"cfl", "t_max", "window", "tol_slope", "alpha_margin", "p_box_radius", "min_consec", "init",
        "scheme"}},
      {"run", {"scales", "pipelines", "out", "lambdas", "discount_p"}}};

  std::vector<IniLine> lines = detail::parse_ini(text);
  for (const auto& l : lines) {
    if (!known_sections.count(l.section))
      throw ConfigError("config line " + std::to_string(l.line_no) + ": unknown section [" + l.section + "]");
    if (!known_keys.at(l.section).count(l.key))
      throw ConfigError("config line " + std::to_string(l.line_no) + ": unknown key '" + l.key +
                        "' in section [" + l.section + "]");
  }

  auto find = [&](const std::string& sec, const std::string& key) -> const IniLine* {
    for (const auto& l : lines)
      if (l.section == sec && l.key == key) return &l;
    return nullptr;
  };

  // ---- hamiltonian
  int dim = 1;
  if (const IniLine* l = find("hamiltonian", "dimension")) {
    dim = detail::to_int(*l);
    if (dim != 1 && dim != 2)
      throw ConfigError("config line " + std::to_string(l->line_no) + ": dimension must be 1 or 2");
  }
  if (const IniLine* l = find("hamiltonian", "preset")) {
    try {
      rc.hamiltonian = presets::by_name(l->value, dim);
    } catch (const std::exception& e) {
      throw ConfigError("config line " + std::to_string(l->line_no) + ": " + e.what());
    }
  } else if (const IniLine* l2 = find("hamiltonian", "kind")) {
    if (l2->value == "radial") {
      const IniLine* lk = find("hamiltonian", "knots");
      const IniLine* lt = find("hamiltonian", "tail_slope");
      if (!lk || !lt) throw ConfigError("config: radial hamiltonian needs 'knots' and 'tail_slope'");
      // knots format: r:phi pairs separated by commas
      std::vector<double> rr, vv;
      std::istringstream in(lk->value);
      std::string cell;
      while (std::getline(in, cell, ',')) {
        cell = detail::trim(cell);
        const auto colon = cell.find(':');
        if (colon == std::string::npos)
          throw ConfigError("config line " + std::to_string(lk->line_no) + ": knots expect r:phi pairs");
        try {
          rr.push_back(std::stod(cell.substr(0, colon)));
          vv.push_back(std::stod(cell.substr(colon + 1)));
        } catch (...) {
          throw ConfigError("config line " + std::to_string(lk->line_no) + ": bad knot '" + cell + "'");
        }
      }
      try {
        rc.hamiltonian = HamiltonianSpec::radial(RadialProfile(rr, vv, detail::to_double(*lt)), dim, "radial");
      } catch (const std::exception& e) {
        throw ConfigError("config line " + std::to_string(lk->line_no) + ": " + e.what());
      }
    } else if (l2->value == "double_well") {
      std::array<double, 2> a{1.0, 0.0};
      if (const IniLine* lo = find("hamiltonian", "offset")) {
        std::vector<double> xs = detail::to_double_list(*lo);
        if (int(xs.size()) != dim)
          throw ConfigError("config line " + std::to_string(lo->line_no) + ": offset needs one entry per dimension");
        a[0] = xs[0];
        if (dim == 2) a[1] = xs[1];
      }
      rc.hamiltonian = HamiltonianSpec::double_well(a, dim);
    } else {
      throw ConfigError("config line " + std::to_string(l2->line_no) + ": unknown hamiltonian kind '" +
                        l2->value + "'");
    }
  } else {
    throw ConfigError("config: [hamiltonian] needs 'preset' or 'kind'");
  }

  // ---- potential
  if (const IniLine* l = find("potential", "kind")) {
    const std::string k = l->value;
    if (k == "zero") rc.potential = PotentialSpec::zero(dim);
    else if (k == "constant") {
      const IniLine* lv = find("potential", "value");
      rc.potential = PotentialSpec::constant(dim, lv ? detail::to_double(*lv) : 0.0);
    } else if (k == "sine_product") rc.potential = PotentialSpec::sine_product(0.0);
    else if (k == "sine_squares") rc.potential = PotentialSpec::sine_squares(0.0);
    else if (k == "asym_sine") rc.potential = PotentialSpec::asym_sine(0.0);
    else if (k == "triangle_1d") {
      const IniLine* lc = find("potential", "c0");
      const IniLine* ls = find("potential", "s");
      try {
        rc.potential = PotentialSpec::triangle(0.0, lc ? detail::to_double(*lc) : 1.0,
                                               ls ? detail::to_double(*ls) : 0.5);
      } catch (const std::exception& e) {
        throw ConfigError("config line " + std::to_string(l->line_no) + ": " + e.what());
      }
    } else
      throw ConfigError("config line " + std::to_string(l->line_no) + ": unknown potential kind '" + k + "'");
  } else {
    rc.potential = PotentialSpec::zero(dim);
  }
  if (rc.potential.dim != dim)
    throw ConfigError("config: potential kind '" + rc.potential.name() + "' is " +
                      std::to_string(rc.potential.dim) + "-D but dimension = " + std::to_string(dim));

  // ---- grids
  int n = dim == 1 ? 401 : 201;
  if (const IniLine* l = find("grid", "n")) n = detail::to_int(*l);
  try {
    rc.grid = TorusGrid(dim, n);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: [grid] ") + e.what());
  }

  int samples = dim == 1 ? 41 : 21;
  double range = 1.0;
  if (const IniLine* l = find("pgrid", "samples")) {
    samples = detail::to_int(*l);
    if (samples % 2 == 0)
      throw ConfigError("config line " + std::to_string(l->line_no) +
                        ": pgrid samples must be odd (0 and the +-p pairs must be nodes)");
  }
  if (const IniLine* l = find("pgrid", "range")) range = detail::to_double(*l);
  try {
    rc.pgrid = PGrid(dim, samples, range);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: [pgrid] ") + e.what());
  }

  // ---- solver
  if (const IniLine* l = find("solver", "cfl")) rc.solver.cfl = detail::to_double(*l);
  if (const IniLine* l = find("solver", "t_max")) rc.solver.t_max = detail::to_double(*l);
  if (const IniLine* l = find("solver", "window")) rc.solver.window = detail::to_double(*l);
  if (const IniLine* l = find("solver", "tol_slope")) rc.solver.tol_slope = detail::to_double(*l);
  if (const IniLine* l = find("solver", "alpha_margin")) rc.solver.alpha_margin = detail::to_double(*l);
  if (const IniLine* l = find("solver", "p_box_radius")) rc.solver.p_box_radius = detail::to_double(*l);
  if (const IniLine* l = find("solver", "min_consec")) rc.solver.min_consec = detail::to_int(*l);
  if (const IniLine* l = find("solver", "scheme")) {
    if (l->value == "weno3") rc.solver.scheme = SolverConfig::Scheme::weno3;
    else if (l->value == "lf1") rc.solver.scheme = SolverConfig::Scheme::lf1;
    else
      throw ConfigError("config line " + std::to_string(l->line_no) + ": scheme must be 'weno3' or 'lf1'");
  }
  if (const IniLine* l = find("solver", "init")) {
    if (l->value == "zero") rc.solver.init = SolverConfig::Init::zero;
    else if (l->value == "cosine") rc.solver.init = SolverConfig::Init::cosine;
    else
      throw ConfigError("config line " + std::to_string(l->line_no) + ": init must be 'zero' or 'cosine'");
  }
  try {
    rc.solver.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: [solver] ") + e.what());
  }

  // ---- run
  if (const IniLine* l = find("run", "scales")) rc.scales = detail::to_double_list(*l);
  if (const IniLine* l = find("run", "lambdas")) rc.lambdas = detail::to_double_list(*l);
  if (const IniLine* l = find("run", "discount_p")) rc.discount_p = detail::to_double_list(*l);
  if (const IniLine* l = find("run", "out")) rc.out_dir = l->value;
  if (const IniLine* l = find("run", "pipelines")) {
    rc.pipelines.clear();
    std::istringstream in(l->value);
    std::string cell;
    const std::set<std::string> known{"direct", "composed", "duality", "diagnostics", "discount"};
    while (std::getline(in, cell, ',')) {
      cell = detail::trim(cell);
      if (cell.empty()) continue;
      if (!known.count(cell))
        throw ConfigError("config line " + std::to_string(l->line_no) + ": unknown pipeline '" + cell + "'");
      rc.pipelines.insert(cell);
    }
    if (rc.pipelines.empty())
      throw ConfigError("config line " + std::to_string(l->line_no) + ": empty pipeline list");
  }
  return rc;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace effham
