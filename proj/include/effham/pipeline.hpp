#pragma once

#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "effham/diagnostics.hpp"
#include "effham/minmax.hpp"
#include "effham/table_io.hpp"

namespace effham {

/// Disk-backed table store. Determinism makes caching sound: a key encodes
/// every parameter that can change the numbers, so a cached table is
/// interchangeable with a fresh sweep.
class TableCache {
 public:
  explicit TableCache(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  EffectiveTable get(const std::string& key, const std::function<EffectiveTable()>& compute) {
    if (dir_.empty()) return compute();
    const std::string path = dir_ + "/" + key + ".csv";
    if (std::filesystem::exists(path)) return read_table(path);
    EffectiveTable t = compute();
    const std::string tmp = path + ".tmp";
    write_table(t, tmp);
    std::filesystem::rename(tmp, path);
    return t;
  }

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
};

inline std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

/// Cache key fragment for the solver knobs that shape the numbers.
inline std::string solver_tag(const SolverConfig& c) {
  std::string s = "cfl" + fmt_g(c.cfl) + "_am" + fmt_g(c.alpha_margin) + "_w" + fmt_g(c.window) + "_ts" +
                  fmt_g(c.tol_slope) + "_mc" + std::to_string(c.min_consec) + "_tm" + fmt_g(c.t_max);
  s += c.init == SolverConfig::Init::zero ? "_z" : "_c";
  if (c.scheme == SolverConfig::Scheme::lf1) s += "_o1";
  return s;
}

struct ComposedRun {
  DecompositionPlan plan;
  std::vector<EffectiveTable> piece_tables;
  EffectiveTable composed;
};

/// Runs the full composition pipeline: decompose, per-piece sweeps
/// (duality for decreasing pieces), min-max assembly. Piece tables are
/// cached individually under key_prefix.
inline ComposedRun composed_pipeline(const HamiltonianSpec& H, const PotentialSpec& V, const PGrid& pg,
                                     const TorusGrid& g, const SolverConfig& cfg, TableCache& cache,
                                     const std::string& key_prefix) {
  if (H.kind != HamiltonianSpec::Kind::radial)
    throw std::invalid_argument("composed pipeline needs a radial Hamiltonian");
  ComposedRun run;
  run.plan = decompose_profile(H.profile, /*relaxed=*/true);
  PotentialStats ex = potential_extrema(V);
  for (std::size_t j = 0; j < run.plan.pieces.size(); ++j) {
    const ProfilePiece& piece = run.plan.pieces[j];
    const std::string key = key_prefix + "_piece" + std::to_string(j);
    run.piece_tables.push_back(cache.get(key, [&]() {
      return piece.increasing ? sweep(HamiltonianSpec::piece(piece, pg.dim), V, pg, g, cfg)
                              : sweep_quasiconcave(piece, V, pg, g, cfg);
    }));
  }
  run.composed = compose_plan(run.plan, run.piece_tables, ex);
  return run;
}

/// Pointwise gap between two tables over nodes converged in both.
inline double table_max_gap(const EffectiveTable& a, const EffectiveTable& b, int* arg = nullptr) {
  if (!(a.pg == b.pg)) throw std::invalid_argument("table_max_gap: p-grid mismatch");
  double worst = 0.0;
  for (int i = 0; i < a.count(); ++i) {
    if (!a.converged[std::size_t(i)] || !b.converged[std::size_t(i)]) continue;
    const double d = std::abs(a.value[std::size_t(i)] - b.value[std::size_t(i)]);
    if (d > worst) {
      worst = d;
      if (arg) *arg = i;
    }
  }
  return worst;
}

}  // namespace effham
