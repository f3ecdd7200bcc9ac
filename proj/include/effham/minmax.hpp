#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "effham/effective.hpp"
#include "effham/potential.hpp"
#include "effham/profile.hpp"

namespace effham {

namespace detail {

inline void require_same_pgrid(const EffectiveTable& a, const EffectiveTable& b, const char* who) {
  if (!(a.pg == b.pg)) throw std::invalid_argument(std::string(who) + ": tables use different p-grids");
}

}  // namespace detail

/// Base two-piece formula: pointwise max{H1bar, H2bar, floor}. The caller
/// asserts the normalization min H = 0, min V = 0, under which floor = 0.
inline EffectiveTable compose_basic(const EffectiveTable& t1, const EffectiveTable& t2, double floor = 0.0) {
  detail::require_same_pgrid(t1, t2, "compose_basic");
  EffectiveTable out(t1.pg, "composed");
  for (int i = 0; i < out.count(); ++i) {
    const std::size_t k = std::size_t(i);
    out.value[k] = std::max({t1.value[k], t2.value[k], floor});
    out.converged[k] = t1.converged[k] && t2.converged[k];
    out.residual[k] = std::max(t1.residual[k], t2.residual[k]);
  }
  out.meta["formula"] = "max{H1,H2,floor}";
  return out;
}

/// Inductive min-max recursion over the plan's pieces:
///   Kbar_{k-1} = min{Hbar_{k-1}, Phibar_{2k-1}, phi(s_{2k-1}) - max V}
///   Hbar_k     = max{Kbar_{k-1}, Phibar_{2k},   phi(s_{2k})   - min V}
/// starting from Hbar_0 = Phibar_0. Piece tables must share one p-grid,
/// ordered as in the plan (increasing pieces from sweep, decreasing from
/// sweep_quasiconcave). Output nodes inherit the worst convergence flag.
inline EffectiveTable compose_inductive(const DecompositionPlan& plan,
                                        const std::vector<EffectiveTable>& piece_tables,
                                        const PotentialStats& vstats) {
  if (int(plan.pieces.size()) != 2 * plan.m + 1)
    throw std::invalid_argument("compose_inductive: plan does not have 2m+1 pieces");
  if (piece_tables.size() != plan.pieces.size())
    throw std::invalid_argument("compose_inductive: piece-count mismatch with plan");
  for (std::size_t j = 1; j < piece_tables.size(); ++j)
    detail::require_same_pgrid(piece_tables[0], piece_tables[j], "compose_inductive");

  EffectiveTable out(piece_tables[0].pg, "composed");
  const int n = out.count();
  for (int i = 0; i < n; ++i) {
    const std::size_t k = std::size_t(i);
    double h = piece_tables[0].value[k];
    bool conv = piece_tables[0].converged[k] != 0;
    double res = piece_tables[0].residual[k];
    for (int step = 1; step <= plan.m; ++step) {
      const auto& odd = piece_tables[std::size_t(2 * step - 1)];
      const auto& even = piece_tables[std::size_t(2 * step)];
      const double kk = std::min({h, odd.value[k], plan.max_levels[std::size_t(step - 1)] - vstats.max});
      h = std::max({kk, even.value[k], plan.min_levels[std::size_t(step - 1)] - vstats.min});
      conv = conv && odd.converged[k] && even.converged[k];
      res = std::max({res, odd.residual[k], even.residual[k]});
    }
    out.value[k] = h;
    out.converged[k] = conv ? 1 : 0;
    out.residual[k] = res;
  }
  out.meta["formula"] = "inductive min-max";
  out.meta["m"] = std::to_string(plan.m);
  return out;
}

/// Dispatches a plan to the right composition: the single-well two-piece
/// max for decreasing-first profiles, the inductive recursion otherwise.
inline EffectiveTable compose_plan(const DecompositionPlan& plan,
                                   const std::vector<EffectiveTable>& piece_tables,
                                   const PotentialStats& vstats) {
  if (plan.profile_class == ProfileClass::single_well) {
    if (piece_tables.size() != 2) throw std::invalid_argument("compose_plan: single-well plan needs 2 tables");
    const double floor = plan.min_levels.at(0) - vstats.min;
    return compose_basic(piece_tables[0], piece_tables[1], floor);
  }
  return compose_inductive(plan, piece_tables, vstats);
}

/// Large-oscillation collapse: when osc V >= (max of H over the well,
/// relative to the well level) the whole nonconvex part drowns and
/// Hbar = max{H1bar, well_level - min V}, which is quasiconvex.
/// h1 is the table of the coercive quasiconvex envelope piece.
inline EffectiveTable large_oscillation_formula(const EffectiveTable& h1, const PotentialStats& vstats,
                                                double max_h_on_well, double well_level = 0.0) {
  if (!(vstats.osc >= max_h_on_well - well_level - 1e-12))
    throw std::invalid_argument("large_oscillation_formula: hypothesis osc V >= max_U H violated");
  EffectiveTable out(h1.pg, "composed");
  const double c = well_level - vstats.min;
  for (int i = 0; i < out.count(); ++i) {
    const std::size_t k = std::size_t(i);
    out.value[k] = std::max(h1.value[k], c);
    out.converged[k] = h1.converged[k];
    out.residual[k] = h1.residual[k];
  }
  out.meta["formula"] = "max{H1, level-minV}";
  out.meta["quasiconvex_by_theorem"] = "1";
  return out;
}

/// One-dimensional conditional decomposition min{H1bar, H2bar}, valid when
/// the potential oscillation stays below the well depth. h1_flat is the
/// table of the plateau surrogate max{H, m1}; h2_qc of the quasiconvex
/// envelope.
inline EffectiveTable conditional_decomposition_1d(const EffectiveTable& h1_flat, const EffectiveTable& h2_qc,
                                                   const PotentialStats& vstats, double well_depth) {
  detail::require_same_pgrid(h1_flat, h2_qc, "conditional_decomposition_1d");
  if (h1_flat.pg.dim != 1)
    throw std::invalid_argument("conditional_decomposition_1d: only valid in one dimension");
  if (!(vstats.osc < well_depth))
    throw std::invalid_argument("conditional_decomposition_1d: requires osc V < well depth");
  EffectiveTable out(h1_flat.pg, "composed");
  for (int i = 0; i < out.count(); ++i) {
    const std::size_t k = std::size_t(i);
    out.value[k] = std::min(h1_flat.value[k], h2_qc.value[k]);
    out.converged[k] = h1_flat.converged[k] && h2_qc.converged[k];
    out.residual[k] = std::max(h1_flat.residual[k], h2_qc.residual[k]);
  }
  out.meta["formula"] = "min{H1,H2}";
  return out;
}

}  // namespace effham
