#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "effham/effective.hpp"

namespace effham {

namespace detail {

inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

constexpr const char* kTableSchema = "effham-table v1";

/// CSV with a '# key=value' header block; 17 significant digits make the
/// round trip bitwise for values, flags and residuals.
inline void write_table(const EffectiveTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_table: cannot open " + path);
  out << "# " << kTableSchema << "\n";
  out << "# provenance=" << t.provenance << "\n";
  out << "# dim=" << t.pg.dim << "\n";
  out << "# samples=" << t.pg.samples << "\n";
  out << "# range1=" << detail::fmt_double(t.pg.range[0]) << "\n";
  out << "# range2=" << detail::fmt_double(t.pg.range[1]) << "\n";
  for (const auto& [k, v] : t.meta) out << "# " << k << "=" << v << "\n";
  out << (t.pg.dim == 1 ? "p1,hbar,converged,residual" : "p1,p2,hbar,converged,residual") << "\n";
  for (int i = 0; i < t.count(); ++i) {
    auto p = t.pg.node(i);
    out << detail::fmt_double(p[0]) << ",";
    if (t.pg.dim == 2) out << detail::fmt_double(p[1]) << ",";
    out << detail::fmt_double(t.value[std::size_t(i)]) << "," << int(t.converged[std::size_t(i)]) << ","
        << detail::fmt_double(t.residual[std::size_t(i)]) << "\n";
  }
  if (!out) throw std::runtime_error("write_table: write failed for " + path);
}

inline EffectiveTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_table: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != std::string("# ") + kTableSchema)
    throw std::runtime_error("read_table: schema-version mismatch in " + path);

  PGrid pg;
  std::string provenance = "direct";
  std::map<std::string, std::string> meta;
  while (in.peek() == '#') {
    std::getline(in, line);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(2, eq - 2);
    const std::string val = line.substr(eq + 1);
    if (key == "provenance") provenance = val;
    else if (key == "dim") pg.dim = std::stoi(val);
    else if (key == "samples") pg.samples = std::stoi(val);
    else if (key == "range1") pg.range[0] = std::stod(val);
    else if (key == "range2") pg.range[1] = std::stod(val);
    else meta[key] = val;
  }
  pg.check();
  std::getline(in, line);  // column header

  EffectiveTable t(pg, provenance);
  t.meta = std::move(meta);
  for (int i = 0; i < t.count(); ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("read_table: truncated table in " + path);
    std::istringstream row(line);
    std::string cell;
    const int skip = pg.dim;  // p columns are reproducible from the grid
    for (int c = 0; c < skip; ++c) std::getline(row, cell, ',');
    std::getline(row, cell, ',');
    t.value[std::size_t(i)] = std::stod(cell);
    std::getline(row, cell, ',');
    t.converged[std::size_t(i)] = std::uint8_t(std::stoi(cell));
    std::getline(row, cell, ',');
    t.residual[std::size_t(i)] = std::stod(cell);
  }
  return t;
}

}  // namespace effham
