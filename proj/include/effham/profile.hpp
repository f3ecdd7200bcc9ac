#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace effham {

/// Continuous piecewise-linear function of r >= 0 given by knots
/// (r_0=0, v_0), ..., (r_k, v_k) and a tail slope on [r_k, inf).
struct PiecewiseLinear {
  std::vector<double> r;
  std::vector<double> v;
  double tail_slope = 1.0;

  PiecewiseLinear() = default;
  PiecewiseLinear(std::vector<double> r_, std::vector<double> v_, double tail)
      : r(std::move(r_)), v(std::move(v_)), tail_slope(tail) {
    if (r.empty() || r.size() != v.size())
      throw std::invalid_argument("PiecewiseLinear: knot arrays empty or mismatched");
    if (r.front() != 0.0) throw std::invalid_argument("PiecewiseLinear: first knot must sit at r=0");
    for (std::size_t i = 1; i < r.size(); ++i)
      if (!(r[i] > r[i - 1])) throw std::invalid_argument("PiecewiseLinear: knots must be strictly ascending");
    for (double x : v)
      if (!std::isfinite(x)) throw std::invalid_argument("PiecewiseLinear: non-finite knot value");
  }

  std::size_t segments() const { return r.size() - 1; }

  double slope(std::size_t seg) const {
    if (seg >= segments()) return tail_slope;
    return (v[seg + 1] - v[seg]) / (r[seg + 1] - r[seg]);
  }

  double eval(double x) const {
    if (x >= r.back()) return v.back() + tail_slope * (x - r.back());
    // knots reproduce stored values exactly
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t seg = std::size_t(it - r.begin());
    if (seg == 0) return v.front();  // x < 0 is not in the domain; clamp
    --seg;
    if (x == r[seg]) return v[seg];
    double t = (x - r[seg]) / (r[seg + 1] - r[seg]);
    return v[seg] + t * (v[seg + 1] - v[seg]);
  }

  double max_abs_slope() const {
    double m = std::abs(tail_slope);
    for (std::size_t s = 0; s < segments(); ++s) m = std::max(m, std::abs(slope(s)));
    return m;
  }

  /// Lipschitz constant restricted to [0, radius].
  double max_abs_slope_within(double radius) const {
    double m = radius >= r.back() ? std::abs(tail_slope) : 0.0;
    for (std::size_t s = 0; s < segments(); ++s)
      if (r[s] < radius) m = std::max(m, std::abs(slope(s)));
    return m;
  }

  double min_value_on(double lo, double hi) const {
    double m = std::min(eval(lo), eval(hi));
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] > lo && r[i] < hi) m = std::min(m, v[i]);
    return m;
  }

  PiecewiseLinear negate() const {
    PiecewiseLinear q = *this;
    for (double& x : q.v) x = -x;
    q.tail_slope = -tail_slope;
    return q;
  }

  /// max{f, level}: clips the graph from below at a constant.
  PiecewiseLinear flatten_below(double level) const {
    std::vector<double> rr, vv;
    auto push = [&](double x, double y) {
      if (!rr.empty() && x <= rr.back()) return;
      rr.push_back(x);
      vv.push_back(y);
    };
    push(0.0, std::max(v.front(), level));
    for (std::size_t s = 0; s < segments(); ++s) {
      double a = v[s], b = v[s + 1];
      if ((a - level) * (b - level) < 0.0) {
        double t = (level - a) / (b - a);
        push(r[s] + t * (r[s + 1] - r[s]), level);
      }
      push(r[s + 1], std::max(b, level));
    }
    double t = tail_slope;
    if (v.back() < level && tail_slope > 0.0) {
      push(r.back() + (level - v.back()) / tail_slope, level);
    }
    return PiecewiseLinear(std::move(rr), std::move(vv), t);
  }
};

/// One quasiconvex/quasiconcave piece of a profile decomposition, defined on
/// all of [0, inf).
struct ProfilePiece {
  PiecewiseLinear fn;
  bool increasing = true;
  // native interval on which the piece coincides with the parent profile
  double native_lo = 0.0;
  double native_hi = 0.0;
};

enum class ProfileClass {
  quasiconvex,     // single nondecreasing leg (m = 0)
  strict_h6,       // alternating, strictly ordered extrema chains
  relaxed_h6,      // alternating with non-strict chains or flat spots
  single_well,     // decreasing then increasing (basic max-decomposition case)
  well_at_origin,  // increasing first but minima chain inverted (deepest well at 0)
  irregular        // alternating pattern broken
};

struct HypothesisReport {
  ProfileClass cls = ProfileClass::irregular;
  int m = 0;                            // number of decreasing legs
  bool alternating = false;             // strictly-monotone alternating legs
  bool alternating_relaxed = false;     // alternating allowing flat spots
  bool minima_chain_strict = false;     // phi(s0) > phi(s2) > ...
  bool minima_chain_relaxed = false;    // with >=
  bool maxima_chain_strict = false;     // phi(s1) < phi(s3) < ...
  bool maxima_chain_relaxed = false;
  bool origin_well = false;             // phi(0) = min phi with a higher interior min (two-scale well)
  std::vector<std::string> violations;  // human-readable failed inequalities
  std::vector<double> extrema_r;        // s_0 .. s_{2m}
  std::vector<double> extrema_v;

  std::string summary() const {
    switch (cls) {
      case ProfileClass::quasiconvex: return "quasiconvex";
      case ProfileClass::strict_h6: return "strict-alternating";
      case ProfileClass::relaxed_h6: return "relaxed-alternating";
      case ProfileClass::single_well: return "single-well";
      case ProfileClass::well_at_origin: return "well-at-origin";
      default: return "irregular";
    }
  }
};

/// Radially symmetric kinetic-energy profile phi(|p|), piecewise linear with
/// alternating monotone legs and a coercive tail.
struct RadialProfile {
  PiecewiseLinear pl;

  RadialProfile() = default;
  explicit RadialProfile(PiecewiseLinear f) : pl(std::move(f)) {
    if (!(pl.tail_slope > 0.0)) throw std::invalid_argument("RadialProfile: tail slope must be positive");
  }
  RadialProfile(std::vector<double> r, std::vector<double> v, double tail)
      : RadialProfile(PiecewiseLinear(std::move(r), std::move(v), tail)) {}

  double eval(double x) const { return pl.eval(x); }
  double max_abs_slope() const { return pl.max_abs_slope(); }
  double max_knot_radius() const { return pl.r.back(); }
  double min_value() const {
    double m = pl.v.front();
    for (double x : pl.v) m = std::min(m, x);
    return m;  // tail increases, so knots carry the minimum
  }

  /// Monotone legs: maximal runs of segments with one strict slope sign.
  /// Zero-slope segments attach to the current run; the tail is an
  /// increasing leg. Returns extrema radii s_0=0, s_1, ..., s_{2m} (or the
  /// leg boundaries when the pattern is irregular).
  HypothesisReport validate() const {
    HypothesisReport rep;
    const std::size_t nseg = pl.segments();
    std::vector<int> sign(nseg + 1);  // +1 / -1 / 0 per segment, tail last
    for (std::size_t s = 0; s < nseg; ++s) {
      double sl = pl.slope(s);
      sign[s] = sl > 0.0 ? 1 : (sl < 0.0 ? -1 : 0);
    }
    sign[nseg] = 1;  // coercive tail

    // collapse to legs: boundaries at strict sign changes
    std::vector<int> leg_sign;
    std::vector<double> leg_start;  // knot radius where the leg begins
    bool has_flat = false;
    int cur = 0;
    for (std::size_t s = 0; s <= nseg; ++s) {
      if (sign[s] == 0) {
        has_flat = true;
        continue;
      }
      if (sign[s] != cur) {
        cur = sign[s];
        leg_sign.push_back(cur);
        // leg starts at the first knot from which this monotone run departs
        double start = (s < nseg) ? pl.r[s] : pl.r.back();
        // flat segments before a direction change belong to the boundary:
        // walk back over zero-slope segments
        std::size_t b = s;
        while (b > 0 && sign[b - 1] == 0) --b;
        start = (b < nseg) ? pl.r[b] : pl.r.back();
        leg_start.push_back(start);
      }
    }
    if (leg_sign.empty()) {  // everything flat, tail rescues coercivity
      leg_sign.push_back(1);
      leg_start.push_back(pl.r.back());
      has_flat = true;
    }

    // extrema radii: leg boundaries, s_0 = 0 always
    rep.extrema_r.push_back(0.0);
    for (std::size_t l = 1; l < leg_sign.size(); ++l) rep.extrema_r.push_back(leg_start[l]);
    for (double x : rep.extrema_r) rep.extrema_v.push_back(eval(x));

    const int legs = int(leg_sign.size());
    rep.m = 0;
    for (int s : leg_sign) rep.m += (s < 0) ? 1 : 0;

    // alternation: signs must alternate and the last leg must increase
    bool alt = leg_sign.back() == 1;
    for (int l = 0; l + 1 < legs; ++l)
      if (leg_sign[l] == leg_sign[l + 1]) alt = false;
    rep.alternating_relaxed = alt;
    rep.alternating = alt && !has_flat;
    if (!alt) {
      rep.violations.push_back("legs do not alternate with an increasing tail");
      rep.cls = ProfileClass::irregular;
      return rep;
    }

    if (leg_sign.front() == -1) {
      // decreasing first: single-well basic case when m = 1
      if (legs == 2) {
        rep.cls = ProfileClass::single_well;
      } else {
        rep.cls = ProfileClass::irregular;
        rep.violations.push_back("multiple wells with decreasing start are not classified");
      }
      return rep;
    }

    if (rep.m == 0) {
      rep.cls = rep.alternating ? ProfileClass::quasiconvex : ProfileClass::relaxed_h6;
      if (!rep.alternating) rep.cls = ProfileClass::quasiconvex;  // flat spots keep quasiconvexity
      return rep;
    }

    // increasing-first alternating family: minima at s_0, s_2, ..., maxima at s_1, s_3, ...
    rep.minima_chain_strict = rep.minima_chain_relaxed = true;
    rep.maxima_chain_strict = rep.maxima_chain_relaxed = true;
    for (int i = 0; i + 2 < int(rep.extrema_r.size()); i += 2) {
      double a = rep.extrema_v[std::size_t(i)], b = rep.extrema_v[std::size_t(i) + 2];
      if (!(a > b)) rep.minima_chain_strict = false;
      if (!(a >= b)) {
        rep.minima_chain_relaxed = false;
        std::ostringstream os;
        os << "phi(s" << i << ")=" << a << " >= phi(s" << i + 2 << ")=" << b << " fails";
        rep.violations.push_back(os.str());
      }
    }
    for (int i = 1; i + 2 < int(rep.extrema_r.size()); i += 2) {
      double a = rep.extrema_v[std::size_t(i)], b = rep.extrema_v[std::size_t(i) + 2];
      if (!(a < b)) rep.maxima_chain_strict = false;
      if (!(a <= b)) {
        rep.maxima_chain_relaxed = false;
        std::ostringstream os;
        os << "phi(s" << i << ")=" << a << " <= phi(s" << i + 2 << ")=" << b << " fails";
        rep.violations.push_back(os.str());
      }
    }

    if (rep.alternating && rep.minima_chain_strict && rep.maxima_chain_strict) {
      rep.cls = ProfileClass::strict_h6;
    } else if (rep.minima_chain_relaxed && rep.maxima_chain_relaxed) {
      rep.cls = ProfileClass::relaxed_h6;
    } else {
      // deepest well at the origin (two-scale structure of the moat type)
      rep.origin_well = true;
      for (std::size_t i = 2; i < rep.extrema_v.size(); i += 2)
        if (rep.extrema_v[i] < rep.extrema_v[0]) rep.origin_well = false;
      rep.cls = ProfileClass::well_at_origin;
    }
    return rep;
  }

  /// max{phi, level} as a profile (used for the plateau surrogate whose
  /// effective Hamiltonian matches above the clip level).
  RadialProfile flatten_below(double level) const { return RadialProfile(pl.flatten_below(level)); }

  /// Quasiconvex envelope with a plateau: keeps phi up to its first maximum
  /// s_1 and clips everything after from below at phi(s_1).
  RadialProfile plateau_envelope() const {
    HypothesisReport rep = validate();
    if (rep.m < 1 || rep.extrema_r.size() < 3)
      throw std::invalid_argument("plateau_envelope: profile has no interior maximum");
    double s1 = rep.extrema_r[1], big = rep.extrema_v[1];
    std::vector<double> rr, vv;
    for (std::size_t i = 0; i < pl.r.size() && pl.r[i] <= s1; ++i) {
      rr.push_back(pl.r[i]);
      vv.push_back(pl.v[i]);
    }
    PiecewiseLinear rest = pl.flatten_below(big);
    bool plateau_open = true;
    for (std::size_t i = 0; i < rest.r.size(); ++i) {
      if (rest.r[i] <= s1) continue;
      if (plateau_open && rest.v[i] > big) {
        // plateau ends where the clipped graph leaves the level
        if (i > 0 && rest.v[i - 1] == big && rest.r[i - 1] > rr.back()) {
          rr.push_back(rest.r[i - 1]);
          vv.push_back(big);
        }
        plateau_open = false;
      }
      if (!plateau_open || rest.v[i] == big) {
        if (rest.r[i] > rr.back()) {
          rr.push_back(rest.r[i]);
          vv.push_back(rest.v[i]);
        }
        if (rest.v[i] > big) plateau_open = false;
      }
    }
    return RadialProfile(std::move(rr), std::move(vv), pl.tail_slope);
  }
};

/// Decomposition of an alternating profile into monotone pieces phi_0 ..
/// phi_{2m} plus the levels phi(s_{2i}), phi(s_{2i-1}) entering the min-max
/// recursion. The potential-dependent constants are formed at composition
/// time.
struct DecompositionPlan {
  std::vector<ProfilePiece> pieces;  // alternating, starting increasing
  std::vector<double> min_levels;    // phi(s_2), phi(s_4), ..., phi(s_{2m})
  std::vector<double> max_levels;    // phi(s_1), phi(s_3), ..., phi(s_{2m-1})
  int m = 0;
  ProfileClass profile_class = ProfileClass::irregular;
  std::vector<double> extension_slopes;  // recorded per piece (left, right interleaved)
};

namespace detail {

inline ProfilePiece build_piece(const PiecewiseLinear& pl, double lo, double hi, bool increasing,
                                bool hi_is_tail, double left_slope, double right_slope) {
  std::vector<double> rr, vv;
  // left extension down to r = 0 keeping monotonicity
  double v_lo = pl.eval(lo);
  if (lo > 0.0) {
    rr.push_back(0.0);
    vv.push_back(v_lo - left_slope * lo);  // increasing: below; decreasing: left_slope < 0 puts it above
  }
  for (std::size_t i = 0; i < pl.r.size(); ++i) {
    if (pl.r[i] >= lo - 1e-15 && (hi_is_tail || pl.r[i] <= hi + 1e-15)) {
      if (!rr.empty() && pl.r[i] <= rr.back() + 1e-15) continue;
      rr.push_back(pl.r[i]);
      vv.push_back(pl.v[i]);
    }
  }
  double tail;
  if (hi_is_tail) {
    tail = pl.tail_slope;
  } else {
    if (rr.empty() || rr.back() < hi - 1e-15) {
      rr.push_back(hi);
      vv.push_back(pl.eval(hi));
    }
    tail = right_slope;
  }
  ProfilePiece piece;
  piece.fn = PiecewiseLinear(std::move(rr), std::move(vv), tail);
  piece.increasing = increasing;
  piece.native_lo = lo;
  piece.native_hi = hi_is_tail ? std::numeric_limits<double>::infinity() : hi;
  return piece;
}

struct OrderViolation {
  bool ok = true;
  double r = 0.0;        // first violating radius
  bool at_tail = false;  // tail-slope comparison failed
};

inline OrderViolation piece_leq(const ProfilePiece& a, const ProfilePiece& b, double rmax, int npts) {
  // a <= b pointwise on [0, rmax], grid check plus tail-slope comparison
  for (int i = 0; i <= npts; ++i) {
    double x = rmax * double(i) / npts;
    if (a.fn.eval(x) > b.fn.eval(x) + 1e-12) return {false, x, false};
  }
  double ta = a.fn.tail_slope, tb = b.fn.tail_slope;
  if (ta > tb + 1e-15) return {false, rmax, true};  // a eventually overtakes b
  return {};
}

}  // namespace detail

/// Splits an alternating profile into monotone pieces. Extension slopes
/// start from the adjacent native segment and are doubled (at most 10 times)
/// until the piece ordering constraints hold on a dense verification grid.
inline DecompositionPlan decompose_profile(const RadialProfile& prof, bool relaxed = false) {
  HypothesisReport rep = prof.validate();
  const bool ok = rep.cls == ProfileClass::quasiconvex || rep.cls == ProfileClass::strict_h6 ||
                  rep.cls == ProfileClass::single_well || rep.cls == ProfileClass::well_at_origin ||
                  (relaxed && rep.cls == ProfileClass::relaxed_h6);
  if (!ok) {
    std::string why = rep.violations.empty() ? rep.summary() : rep.violations.front();
    throw std::invalid_argument("decompose_profile: profile not decomposable (" + why + ")");
  }
  if (rep.cls == ProfileClass::relaxed_h6 && !relaxed)
    throw std::invalid_argument("decompose_profile: profile needs the relaxed flag");

  DecompositionPlan plan;
  plan.m = rep.m;
  plan.profile_class = rep.cls;

  const PiecewiseLinear& pl = prof.pl;
  const std::vector<double>& s = rep.extrema_r;
  const double s_last = s.back();
  const double span = std::max(s_last - s.front(), 1.0);
  const double rmax = s_last + 2.0 * span;
  const int npts = 1000;

  auto native_slope_near = [&](double x, bool left_of) -> double {
    // representative |slope| of the native segment touching x
    if (!left_of && x >= pl.r.back() - 1e-15) return std::abs(pl.tail_slope);
    for (std::size_t seg = 0; seg < pl.segments(); ++seg) {
      double a = pl.r[seg], b = pl.r[seg + 1];
      if (left_of ? (x > a && x <= b + 1e-15) : (x >= a - 1e-15 && x < b)) {
        double sl = std::abs(pl.slope(seg));
        if (sl > 0.0) return sl;
      }
    }
    return std::max(1.0, pl.max_abs_slope());
  };

  if (rep.cls == ProfileClass::single_well) {
    // decreasing leg then increasing tail: two pieces glued at the minimum
    double smin = s[1];
    double up_slope = native_slope_near(smin, false);
    double down_slope = native_slope_near(smin, true);
    ProfilePiece inc = detail::build_piece(pl, smin, 0.0, true, true, up_slope, 0.0);
    // decreasing piece: native on [0, smin], extended down past smin
    std::vector<double> rr(pl.r.begin(), pl.r.end());
    std::vector<double> vv(pl.v.begin(), pl.v.end());
    std::vector<double> rr2, vv2;
    for (std::size_t i = 0; i < rr.size(); ++i)
      if (rr[i] <= smin + 1e-15) {
        rr2.push_back(rr[i]);
        vv2.push_back(vv[i]);
      }
    ProfilePiece dec;
    dec.fn = PiecewiseLinear(std::move(rr2), std::move(vv2), -down_slope);
    dec.increasing = false;
    dec.native_lo = 0.0;
    dec.native_hi = smin;
    plan.pieces = {inc, dec};
    plan.extension_slopes = {up_slope, down_slope};
    plan.min_levels = {prof.eval(smin)};
    plan.max_levels = {};
    plan.m = 1;
    return plan;
  }

  // increasing-first family: piece j native on [s_j, s_{j+1}]
  const int npieces = 2 * rep.m + 1;
  std::vector<double> left_mult(std::size_t(npieces), 1.0), right_mult(std::size_t(npieces), 1.0);

  auto materialize = [&]() {
    plan.pieces.clear();
    plan.extension_slopes.clear();
    for (int j = 0; j < npieces; ++j) {
      double lo = s[std::size_t(j)];
      bool is_tail = (j == npieces - 1);
      double hi = is_tail ? 0.0 : s[std::size_t(j) + 1];
      bool inc = (j % 2 == 0);
      double ls = native_slope_near(lo, false) * left_mult[std::size_t(j)];
      double rs = is_tail ? 0.0 : native_slope_near(hi, true) * right_mult[std::size_t(j)];
      double left = inc ? ls : -ls;    // increasing pieces drop to the left, decreasing rise
      double right = inc ? rs : -rs;   // increasing pieces keep rising, decreasing keep falling
      plan.pieces.push_back(detail::build_piece(pl, lo, hi, inc, is_tail, left, right));
      plan.extension_slopes.push_back(left);
      plan.extension_slopes.push_back(right);
    }
  };

  materialize();
  // Violations in piece j's right-extension region steepen right_mult[j]
  // (fixes cascade toward smaller j only); violations left of it steepen
  // left_mult[j+2] (cascade toward larger j only), so the loop terminates.
  auto check_pair = [&](int j) {
    const bool inc = (j % 2 == 0);
    return inc ? detail::piece_leq(plan.pieces[std::size_t(j) + 2], plan.pieces[std::size_t(j)], rmax, npts)
               : detail::piece_leq(plan.pieces[std::size_t(j)], plan.pieces[std::size_t(j) + 2], rmax, npts);
  };
  for (int iter = 0;; ++iter) {
    bool all_ok = true;
    for (int j = 0; j + 2 < npieces; ++j) {
      detail::OrderViolation v = check_pair(j);
      if (v.ok) continue;
      all_ok = false;
      if (iter >= 10) {
        std::ostringstream os;
        os << "decompose_profile: ordering of pieces " << j << " and " << j + 2
           << " unsatisfiable after slope steepening";
        throw std::runtime_error(os.str());
      }
      const bool beyond_native = v.at_tail || v.r >= plan.pieces[std::size_t(j)].native_hi - 1e-15;
      if (beyond_native) right_mult[std::size_t(j)] *= 2.0;
      else left_mult[std::size_t(j) + 2] *= 2.0;
    }
    if (all_ok) break;
    materialize();
  }

  for (std::size_t i = 2; i < s.size(); i += 2) plan.min_levels.push_back(rep.extrema_v[i]);
  for (std::size_t i = 1; i < s.size(); i += 2) plan.max_levels.push_back(rep.extrema_v[i]);
  return plan;
}

/// Pointwise value of the min-max recursion applied to the bare pieces with
/// potential extrema (vmin, vmax). With V == 0 this reconstructs phi for
/// ordered alternating profiles.
inline double plan_reconstruct(const DecompositionPlan& plan, double x, double vmin = 0.0, double vmax = 0.0) {
  if (plan.pieces.size() == 2 && !plan.pieces[1].increasing && plan.pieces[0].native_lo > 0.0) {
    // single-well: max of the two pieces and the well level
    double c = plan.min_levels.empty() ? 0.0 : plan.min_levels[0] - vmin;
    return std::max({plan.pieces[0].fn.eval(x), plan.pieces[1].fn.eval(x), c});
  }
  double h = plan.pieces[0].fn.eval(x);
  for (int k = 1; k <= plan.m; ++k) {
    double kk = std::min({h, plan.pieces[std::size_t(2 * k - 1)].fn.eval(x), plan.max_levels[std::size_t(k - 1)] - vmax});
    h = std::max({kk, plan.pieces[std::size_t(2 * k)].fn.eval(x), plan.min_levels[std::size_t(k - 1)] - vmin});
  }
  return h;
}

}  // namespace effham
