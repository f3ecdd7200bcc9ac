#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "effham/effective.hpp"
#include "effham/lf_solver.hpp"

namespace effham {

struct DiagnosticReport {
  enum class Kind { evenness, quasiconvexity, levelset, flatpart, flimit, discount };
  Kind kind = Kind::evenness;
  bool pass = false;
  double defect = 0.0;
  double tolerance = 0.0;
  std::vector<std::array<double, 3>> witnesses;  // (p1, p2, level or aux)
  int excluded_nodes = 0;                        // unconverged nodes left out
  std::string note;

  static const char* kind_name(Kind k) {
    switch (k) {
      case Kind::evenness: return "evenness";
      case Kind::quasiconvexity: return "quasiconvexity";
      case Kind::levelset: return "levelset";
      case Kind::flatpart: return "flatpart";
      case Kind::flimit: return "flimit";
      case Kind::discount: return "discount";
    }
    return "?";
  }
};

/// max over converged node pairs of |T(p) - T(-p)|.
inline DiagnosticReport evenness_defect(const EffectiveTable& t, double tolerance = 2e-2) {
  DiagnosticReport rep;
  rep.kind = DiagnosticReport::Kind::evenness;
  rep.tolerance = tolerance;
  for (int i = 0; i < t.count(); ++i) {
    const int j = t.pg.mirror(i);
    if (!t.converged[std::size_t(i)] || !t.converged[std::size_t(j)]) {
      ++rep.excluded_nodes;
      continue;
    }
    const double d = std::abs(t.value[std::size_t(i)] - t.value[std::size_t(j)]);
    if (d > rep.defect) rep.defect = d;
    if (d > tolerance) {
      auto p = t.pg.node(i);
      rep.witnesses.push_back({p[0], p[1], d});
    }
  }
  rep.pass = rep.defect <= tolerance;
  if (rep.pass) rep.witnesses.clear();
  return rep;
}

namespace hullgeo {

struct IPt {
  std::int64_t x, y;
  bool operator<(const IPt& o) const { return x < o.x || (x == o.x && y < o.y); }
  bool operator==(const IPt& o) const { return x == o.x && y == o.y; }
};

inline std::int64_t cross(const IPt& o, const IPt& a, const IPt& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Andrew monotone chain; exact integer predicates. Returns a CCW hull,
/// possibly degenerate (point or segment).
inline std::vector<IPt> convex_hull(std::vector<IPt> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<IPt> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

inline bool on_segment(const IPt& a, const IPt& b, const IPt& q) {
  if (cross(a, b, q) != 0) return false;
  return std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= q.y &&
         q.y <= std::max(a.y, b.y);
}

/// Point in (or on) the convex hull, handling degenerate hulls.
inline bool inside_hull(const std::vector<IPt>& h, const IPt& q) {
  if (h.empty()) return false;
  if (h.size() == 1) return h[0] == q;
  if (h.size() == 2) return on_segment(h[0], h[1], q);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const IPt& a = h[i];
    const IPt& b = h[(i + 1) % h.size()];
    if (cross(a, b, q) < 0) return false;
  }
  return true;
}

}  // namespace hullgeo

namespace detail {

/// Worst sublevel-convexity violation at one level: nodes inside the convex
/// hull of {T <= mu} (1-D: inside the index interval) must satisfy
/// T <= mu + tol. Returns max(value - mu) over offending interior nodes.
inline double levelset_violation(const EffectiveTable& t, double mu,
                                 std::vector<std::array<double, 3>>* witnesses, double tol) {
  double worst = 0.0;
  if (t.pg.dim == 1) {
    int lo = t.count(), hi = -1;
    for (int i = 0; i < t.count(); ++i) {
      if (!t.converged[std::size_t(i)]) continue;
      if (t.value[std::size_t(i)] <= mu) {
        lo = std::min(lo, i);
        hi = std::max(hi, i);
      }
    }
    for (int i = lo; i <= hi; ++i) {
      if (!t.converged[std::size_t(i)]) continue;
      const double excess = t.value[std::size_t(i)] - mu;
      if (excess > worst) worst = excess;
      if (excess > tol && witnesses) witnesses->push_back({t.pg.axis_node(0, i), 0.0, mu});
    }
    return worst;
  }
  std::vector<hullgeo::IPt> in_set;
  for (int i = 0; i < t.count(); ++i) {
    if (!t.converged[std::size_t(i)]) continue;
    if (t.value[std::size_t(i)] <= mu)
      in_set.push_back({std::int64_t(i % t.pg.samples), std::int64_t(i / t.pg.samples)});
  }
  if (in_set.size() < 2) return 0.0;
  const std::vector<hullgeo::IPt> hull = hullgeo::convex_hull(std::move(in_set));
  for (int i = 0; i < t.count(); ++i) {
    if (!t.converged[std::size_t(i)]) continue;
    if (t.value[std::size_t(i)] <= mu) continue;
    const hullgeo::IPt q{std::int64_t(i % t.pg.samples), std::int64_t(i / t.pg.samples)};
    if (!hullgeo::inside_hull(hull, q)) continue;
    const double excess = t.value[std::size_t(i)] - mu;
    if (excess > worst) worst = excess;
    if (excess > tol && witnesses) {
      auto p = t.pg.node(i);
      witnesses->push_back({p[0], p[1], mu});
    }
  }
  return worst;
}

inline int count_unconverged(const EffectiveTable& t) {
  int k = 0;
  for (auto c : t.converged) k += c ? 0 : 1;
  return k;
}

}  // namespace detail

/// Grid quasiconvexity: every sampled level set must be convex up to
/// level_tolerance. Levels are the distinct converged table values.
inline DiagnosticReport quasiconvexity_check(const EffectiveTable& t, double level_tolerance = 2e-2) {
  DiagnosticReport rep;
  rep.kind = DiagnosticReport::Kind::quasiconvexity;
  rep.tolerance = level_tolerance;
  rep.excluded_nodes = detail::count_unconverged(t);
  std::vector<double> levels;
  for (int i = 0; i < t.count(); ++i)
    if (t.converged[std::size_t(i)]) levels.push_back(t.value[std::size_t(i)]);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               levels.end());
  for (double mu : levels) {
    const double v = detail::levelset_violation(t, mu, &rep.witnesses, level_tolerance);
    if (v > rep.defect) rep.defect = v;
  }
  rep.pass = rep.defect <= level_tolerance;
  if (rep.pass) rep.witnesses.clear();
  return rep;
}

/// Single-level variant of the quasiconvexity check.
inline DiagnosticReport levelset_convexity(const EffectiveTable& t, double mu, double tolerance = 2e-2) {
  DiagnosticReport rep;
  rep.kind = DiagnosticReport::Kind::levelset;
  rep.tolerance = tolerance;
  rep.excluded_nodes = detail::count_unconverged(t);
  rep.defect = detail::levelset_violation(t, mu, &rep.witnesses, tolerance);
  rep.pass = rep.defect <= tolerance;
  if (rep.pass) rep.witnesses.clear();
  std::ostringstream os;
  os << "mu=" << mu;
  rep.note = os.str();
  return rep;
}

/// Flat-part detector: the node set {T <= min T + value_tol}. Defect is the
/// set's diameter in p units; pass means no interior node (minimum confined
/// to one cell), witnesses list the flat nodes otherwise.
inline DiagnosticReport flat_part(const EffectiveTable& t, double value_tol = 2e-2) {
  DiagnosticReport rep;
  rep.kind = DiagnosticReport::Kind::flatpart;
  rep.excluded_nodes = detail::count_unconverged(t);
  double vmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < t.count(); ++i)
    if (t.converged[std::size_t(i)]) vmin = std::min(vmin, t.value[std::size_t(i)]);
  std::vector<int> flat;
  for (int i = 0; i < t.count(); ++i)
    if (t.converged[std::size_t(i)] && t.value[std::size_t(i)] <= vmin + value_tol) flat.push_back(i);

  auto in_flat = [&](int i, int j) {
    if (i < 0 || i >= t.pg.samples || j < 0 || (t.pg.dim == 2 && j >= t.pg.samples)) return false;
    const int idx = t.pg.index(i, j);
    return t.converged[std::size_t(idx)] && t.value[std::size_t(idx)] <= vmin + value_tol;
  };
  bool interior = false;
  for (int idx : flat) {
    const int i = t.pg.dim == 1 ? idx : idx % t.pg.samples;
    const int j = t.pg.dim == 1 ? 0 : idx / t.pg.samples;
    bool all = in_flat(i - 1, j) && in_flat(i + 1, j);
    if (t.pg.dim == 2) all = all && in_flat(i, j - 1) && in_flat(i, j + 1);
    if (all) {
      interior = true;
      break;
    }
  }
  for (std::size_t a = 0; a < flat.size(); ++a)
    for (std::size_t b = a + 1; b < flat.size(); ++b) {
      auto pa = t.pg.node(flat[a]), pb = t.pg.node(flat[b]);
      rep.defect = std::max(rep.defect, std::hypot(pa[0] - pb[0], pa[1] - pb[1]));
    }
  // one-cell diameter: minimum attained in a single grid cell
  const double cell = 2.0 * t.pg.range[0] / (t.pg.samples - 1);
  rep.tolerance = t.pg.dim == 1 ? cell : cell * std::numbers::sqrt2;
  rep.pass = !interior;
  if (!rep.pass)
    for (int idx : flat) {
      auto p = t.pg.node(idx);
      rep.witnesses.push_back({p[0], p[1], t.value[std::size_t(idx)]});
    }
  rep.note = interior ? "flat part present" : "minimum confined to one cell";
  return rep;
}

/// Closed-form limit shape of the double-well family under the
/// line-minimum potential.
inline double f_infinity(double p1, double p2) {
  return std::max(std::abs(p2), std::min(std::abs(p1 - 1.0), std::abs(p1 + 1.0)));
}

/// Checks tables Hbar(.,S) along an increasing scale sequence against the
/// limit shape: (i) Hbar >= F_inf - tol for every S, (ii) sup-distance to
/// F_inf strictly decreasing.
inline DiagnosticReport compare_flimit(const std::vector<EffectiveTable>& tables,
                                       const std::vector<double>& scales, double tolerance = 2e-2) {
  if (tables.empty() || tables.size() != scales.size())
    throw std::invalid_argument("compare_flimit: need one table per scale");
  DiagnosticReport rep;
  rep.kind = DiagnosticReport::Kind::flimit;
  rep.tolerance = tolerance;
  std::vector<double> sup(tables.size(), 0.0);
  double worst_onesided = 0.0;
  for (std::size_t k = 0; k < tables.size(); ++k) {
    const EffectiveTable& t = tables[k];
    if (t.pg.dim != 2) throw std::invalid_argument("compare_flimit: tables must be 2-D");
    for (int i = 0; i < t.count(); ++i) {
      if (!t.converged[std::size_t(i)]) {
        ++rep.excluded_nodes;
        continue;
      }
      auto p = t.pg.node(i);
      const double gap = t.value[std::size_t(i)] - f_infinity(p[0], p[1]);
      sup[k] = std::max(sup[k], std::abs(gap));
      if (-gap > worst_onesided) {
        worst_onesided = -gap;
        if (-gap > tolerance) rep.witnesses.push_back({p[0], p[1], scales[k]});
      }
    }
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < sup.size(); ++k)
    if (!(sup[k] < sup[k - 1])) decreasing = false;
  rep.defect = worst_onesided;
  rep.pass = worst_onesided <= tolerance && decreasing;
  if (rep.pass) rep.witnesses.clear();
  std::ostringstream os;
  os << "sup|Hbar-Finf| per S:";
  for (std::size_t k = 0; k < sup.size(); ++k) os << " " << scales[k] << ":" << sup[k];
  if (!decreasing) os << " (not decreasing)";
  rep.note = os.str();
  return rep;
}

/// Discounted-approximation consistency: defect_k = |lambda_k v_k(0) +
/// Hbar(p)| must be nonincreasing in k (10% slack) with the last defect
/// below tolerance. hbar_direct, when NaN, is recomputed by the big-T
/// estimator. Solves warm-start along the lambda chain.
inline DiagnosticReport discounted_consistency(const HamiltonianSpec& H, const PotentialSpec& V,
                                               std::span<const double> p, const std::vector<double>& lambdas,
                                               const TorusGrid& g, const SolverConfig& cfg,
                                               double hbar_direct = std::numeric_limits<double>::quiet_NaN(),
                                               double tolerance = 5e-2) {
  if (lambdas.empty()) throw std::invalid_argument("discounted_consistency: empty lambda sequence");
  for (std::size_t k = 1; k < lambdas.size(); ++k)
    if (!(lambdas[k] < lambdas[k - 1] && lambdas[k] > 0.0))
      throw std::invalid_argument("discounted_consistency: lambdas must be positive decreasing");

  DiagnosticReport rep;
  rep.kind = DiagnosticReport::Kind::discount;
  rep.tolerance = tolerance;
  double hbar = hbar_direct;
  if (std::isnan(hbar)) hbar = big_t_effective(H, V, p, g, cfg).hbar;

  std::vector<double> defects;
  Field carry;
  bool have_carry = false;
  double lam_prev = 0.0;
  for (double lam : lambdas) {
    if (have_carry) {
      // the constant -Hbar/lambda part dominates; rescale it for the new lambda
      for (double& x : carry.a) x *= lam_prev / lam;
    }
    DiscountedResult r = discounted_value(H, V, p, lam, g, cfg, have_carry ? &carry : nullptr);
    lam_prev = lam;
    if (!r.converged) rep.note += "[lambda=" + std::to_string(lam) + " unconverged] ";
    defects.push_back(std::abs(lam * r.v.a[0] + hbar));
    carry = std::move(r.v);
    have_carry = true;
  }
  bool monotone = true;
  for (std::size_t k = 1; k < defects.size(); ++k)
    if (!(defects[k] <= 1.1 * defects[k - 1] + 1e-12)) monotone = false;
  rep.defect = defects.back();
  rep.pass = monotone && defects.back() <= tolerance;
  std::ostringstream os;
  os << "defects:";
  for (std::size_t k = 0; k < defects.size(); ++k) os << " " << lambdas[k] << ":" << defects[k];
  rep.note += os.str();
  if (!rep.pass)
    for (std::size_t k = 0; k < defects.size(); ++k) rep.witnesses.push_back({lambdas[k], defects[k], 0.0});
  return rep;
}

}  // namespace effham
