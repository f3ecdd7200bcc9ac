#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "effham/lf_solver.hpp"
#include "effham/parallel.hpp"

namespace effham {

/// Symmetric momentum lattice: odd sample counts put 0 and the +-p pairs
/// exactly on nodes, so evenness checks never interpolate.
struct PGrid {
  int dim = 1;
  int samples = 21;  // per axis, odd
  std::array<double, 2> range{1.0, 1.0};

  PGrid() = default;
  PGrid(int dim_, int samples_, double range_ = 1.0) : dim(dim_), samples(samples_), range{range_, range_} {
    check();
  }
  void check() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("PGrid: dim must be 1 or 2");
    if (samples < 3 || samples % 2 == 0) throw std::invalid_argument("PGrid: samples must be odd and >= 3");
    if (!(range[0] > 0.0) || !(range[1] > 0.0)) throw std::invalid_argument("PGrid: range must be positive");
  }

  int count() const { return dim == 1 ? samples : samples * samples; }
  double axis_node(int axis, int k) const {
    // centered form: node(samples-1-k) == -node(k) holds bitwise
    const int half = (samples - 1) / 2;
    return double(k - half) * (range[std::size_t(axis)] / half);
  }
  std::array<double, 2> node(int idx) const {
    if (dim == 1) return {axis_node(0, idx), 0.0};
    return {axis_node(0, idx % samples), axis_node(1, idx / samples)};
  }
  int index(int i, int j = 0) const { return dim == 1 ? i : i + samples * j; }
  /// Index of -p; exact because the lattice is symmetric.
  int mirror(int idx) const {
    if (dim == 1) return samples - 1 - idx;
    int i = idx % samples, j = idx / samples;
    return (samples - 1 - i) + samples * (samples - 1 - j);
  }
  bool operator==(const PGrid& o) const {
    return dim == o.dim && samples == o.samples && range == o.range;
  }
};

/// Sampled map p -> Hbar(p) with per-node convergence metadata.
struct EffectiveTable {
  PGrid pg;
  std::vector<double> value;
  std::vector<std::uint8_t> converged;
  std::vector<double> residual;
  std::string provenance = "direct";  // direct | composed | duality | constant
  std::map<std::string, std::string> meta;

  EffectiveTable() = default;
  explicit EffectiveTable(const PGrid& g, std::string prov = "direct")
      : pg(g),
        value(std::size_t(g.count()), 0.0),
        converged(std::size_t(g.count()), 1),
        residual(std::size_t(g.count()), 0.0),
        provenance(std::move(prov)) {}

  int count() const { return pg.count(); }
  bool all_finite() const {
    for (double v : value)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

namespace detail {

/// One independent cold solve per node. Cold starts are deliberate: a field
/// carried over from a neighboring momentum can be an exact relative
/// equilibrium of the discrete flow with the wrong branch structure
/// (WENO reconstruction is not monotone), which freezes the estimator on a
/// spurious slope. Nodes are distributed over workers by index; results do
/// not depend on the schedule.
inline void sweep_core(const HamiltonianSpec& H, const std::vector<double>& vnorm, double osc_v,
                       const PGrid& pg, const TorusGrid& g, const SolverConfig& cfg, EffectiveTable& out) {
  parallel_for_items(pg.count(), [&](int idx) {
    const std::array<double, 2> p = pg.node(idx);
    BigTResult r =
        evolve_bigT(H, vnorm, std::span<const double>(p.data(), std::size_t(pg.dim)), g, cfg, osc_v);
    out.value[std::size_t(idx)] = r.hbar;
    out.converged[std::size_t(idx)] = r.converged ? 1 : 0;
    out.residual[std::size_t(idx)] = r.residual;
  });
}

}  // namespace detail

/// Direct big-T sweep over the momentum lattice. The potential is
/// normalized to min 0 for the solve; output is shifted back to the
/// unnormalized problem.
inline EffectiveTable sweep(const HamiltonianSpec& H, const PotentialSpec& V, const PGrid& pg,
                            const TorusGrid& g, const SolverConfig& cfg) {
  if (!H.coercive()) throw std::invalid_argument("sweep: Hamiltonian must be coercive");
  if (H.dim != pg.dim || V.dim != g.dim || H.dim != g.dim)
    throw std::invalid_argument("sweep: dimension mismatch");
  PotentialStats ex = potential_extrema(V);
  Field vf = sample_potential(V, g);
  for (double& x : vf.a) x -= ex.min;

  EffectiveTable out(pg, "direct");
  detail::sweep_core(H, vf.a, ex.osc, pg, g, cfg, out);
  for (double& v : out.value) v -= ex.min;
  out.meta["hamiltonian"] = H.name;
  out.meta["potential"] = V.name();
  out.meta["scale"] = std::to_string(V.scale);
  out.meta["grid_n"] = std::to_string(g.n);
  return out;
}

/// Effective Hamiltonian of a strictly decreasing (quasiconcave,
/// noncoercive) piece via duality: solve the coercive problem for
/// G(q) = -phi(|q|) with potential -V and mirror the table,
/// Hbar_piece(p) = -Gbar(-p) - max V.
inline EffectiveTable sweep_quasiconcave(const ProfilePiece& piece, const PotentialSpec& V, const PGrid& pg,
                                         const TorusGrid& g, const SolverConfig& cfg) {
  if (piece.increasing) throw std::invalid_argument("sweep_quasiconcave: piece must be decreasing");
  HamiltonianSpec dual = HamiltonianSpec::piece(piece.fn.negate(), true, pg.dim, "dual_piece");

  PotentialStats ex = potential_extrema(V);
  Field vf = sample_potential(V, g);
  for (double& x : vf.a) x = ex.max - x;  // -V normalized to min 0

  EffectiveTable gtab(pg, "duality");
  detail::sweep_core(dual, vf.a, ex.osc, pg, g, cfg, gtab);

  EffectiveTable out(pg, "duality");
  for (int i = 0; i < pg.count(); ++i) {
    const int j = pg.mirror(i);
    out.value[std::size_t(i)] = -gtab.value[std::size_t(j)] - ex.max;
    out.converged[std::size_t(i)] = gtab.converged[std::size_t(j)];
    out.residual[std::size_t(i)] = gtab.residual[std::size_t(j)];
  }
  out.meta["hamiltonian"] = "piece(decreasing)";
  out.meta["potential"] = V.name();
  out.meta["scale"] = std::to_string(V.scale);
  out.meta["grid_n"] = std::to_string(g.n);
  return out;
}

/// Ground-truth cell-problem value for the 1-D unit eikonal H(p) = |p|:
/// Hbar(p) = max{0, |p| - integral of (V - min V)}. Quadrature uses 1e5
/// midpoint nodes.
inline double oracle_1d_eikonal(const PotentialSpec& V, double p) {
  if (V.dim != 1) throw std::invalid_argument("oracle_1d_eikonal: potential must be 1-D");
  const int K = 100000;
  double sum = 0.0;
  for (int i = 0; i < K; ++i) sum += V.eval1((i + 0.5) / K);
  const double mean = sum / K - potential_extrema(V).min;
  return std::max(0.0, std::abs(p) - mean);
}

/// Same oracle routed through a Hamiltonian spec; rejects anything that is
/// not the unit-slope eikonal.
inline double oracle_1d_eikonal(const HamiltonianSpec& H, const PotentialSpec& V, double p) {
  const bool unit_eikonal = H.kind == HamiltonianSpec::Kind::radial && H.profile.pl.r.size() == 1 &&
                            H.profile.pl.v[0] == 0.0 && H.profile.pl.tail_slope == 1.0;
  if (!unit_eikonal) throw std::invalid_argument("oracle_1d_eikonal: Hamiltonian must be the unit eikonal");
  return oracle_1d_eikonal(V, p);
}

}  // namespace effham
