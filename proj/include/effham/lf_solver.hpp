#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "effham/grid.hpp"
#include "effham/hamiltonian.hpp"
#include "effham/potential.hpp"
#include "effham/weno.hpp"

namespace effham {

struct SolverConfig {
  double cfl = 0.5;
  double t_max = 80.0;
  double window = 10.0;       // trailing time window for the slope estimate
  double tol_slope = 1e-3;    // successive window-estimate change
  double alpha_margin = 1.5;  // safety factor on the LF dissipation bound
  double p_box_radius = 0.0;  // 0 = auto: |p| + osc V + outermost profile knot
  int min_consec = 2;         // agreeing successive estimates required
  double steady_eps = 1e-12;  // relative fixed-point detector
  enum class Init { zero, cosine } init = Init::zero;  // cosine: cos(2pi x1)sin(2pi x2), 1-D cos(2pi x)
  // weno3 is the production scheme; lf1 (first-order one-sided gradients)
  // is provably monotone and serves as an independent cross-check
  enum class Scheme { weno3, lf1 } scheme = Scheme::weno3;

  void validate() const {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("SolverConfig: cfl must be in (0,1]");
    if (!(t_max > 0.0) || !(window > 0.0) || !(tol_slope > 0.0))
      throw std::invalid_argument("SolverConfig: t_max, window, tol_slope must be positive");
    if (!(alpha_margin >= 1.0)) throw std::invalid_argument("SolverConfig: alpha_margin must be >= 1");
    if (min_consec < 2) throw std::invalid_argument("SolverConfig: min_consec must be >= 2");
  }
};

struct NumericalInstability : std::runtime_error {
  double t;
  explicit NumericalInstability(double time)
      : std::runtime_error("numerical instability at t=" + std::to_string(time)), t(time) {}
};

/// Lax-Friedrichs numerical Hamiltonian: H at the gradient midpoint minus
/// the dissipation alpha.(dp-dm)/2. Monotone whenever alpha bounds the
/// per-axis Lipschitz constant of q -> H(q) over the realized gradient box.
inline double lf_flux(const HamiltonianSpec& H, std::span<const double> p, std::span<const double> grad_minus,
                      std::span<const double> grad_plus, std::span<const double> alpha) {
  std::array<double, 2> mid{};
  for (std::size_t i = 0; i < p.size(); ++i) mid[i] = p[i] + 0.5 * (grad_minus[i] + grad_plus[i]);
  double val = H.eval(std::span<const double>(mid.data(), p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) val -= 0.5 * alpha[i] * (grad_plus[i] - grad_minus[i]);
  return val;
}

namespace detail {

/// Flattened radial evaluator for the stencil loops (linear knot scan).
struct RadialEval {
  int k = 0;
  std::array<double, 24> r{}, v{}, sl{};

  explicit RadialEval(const PiecewiseLinear& f) {
    k = int(f.r.size());
    if (k > 24) throw std::invalid_argument("profile has too many knots for the solver fast path");
    for (int i = 0; i < k; ++i) {
      r[std::size_t(i)] = f.r[std::size_t(i)];
      v[std::size_t(i)] = f.v[std::size_t(i)];
      sl[std::size_t(i)] = (i + 1 < k) ? f.slope(std::size_t(i)) : f.tail_slope;
    }
  }
  double operator()(double x) const {
    int i = k - 1;
    while (i > 0 && x < r[std::size_t(i)]) --i;
    return v[std::size_t(i)] + sl[std::size_t(i)] * (x - r[std::size_t(i)]);
  }
};

struct StepStats {
  double dmin = 0.0, dmax = 0.0;  // extrema of w_new - w_old over the grid
};

/// Semi-discrete right-hand side  L(w) = V - [LF flux] - lambda*w  and the
/// three-stage SSP integrator around it. HF is a callable q -> H(p+q) value
/// (1-D: one argument, 2-D: two).
template <int Dim, class HF>
class LfOperator {
 public:
  LfOperator(const TorusGrid& g, HF hf, const std::vector<double>& vpot, std::array<double, 2> alpha,
             double lambda, bool first_order = false)
      : g_(g), hf_(hf), vpot_(vpot), alpha_(alpha), lambda_(lambda), first_order_(first_order),
        pad_(std::size_t(g.n) + 5) {
    if (g.n < 5) throw std::invalid_argument("solver grid too small (need n >= 5)");
  }

  void rhs(const std::vector<double>& w, std::vector<double>& out) {
    const int n = g_.n;
    const double h = g_.h();
    const double inv2h = 0.5 / h;
    if constexpr (Dim == 1) {
      dmx_.resize(std::size_t(n));
      dpx_.resize(std::size_t(n));
      if (first_order_) {
        const double invh = 1.0 / h;
        for (int i = 0; i < n; ++i) {
          const int im = i == 0 ? n - 1 : i - 1;
          const int ip = i + 1 == n ? 0 : i + 1;
          dmx_[std::size_t(i)] = (w[std::size_t(i)] - w[std::size_t(im)]) * invh;
          dpx_[std::size_t(i)] = (w[std::size_t(ip)] - w[std::size_t(i)]) * invh;
        }
      } else {
        weno::line(w.data(), n, h, dmx_.data(), dpx_.data(), pad_.data());
      }
      for (int i = 0; i < n; ++i) {
        const double dm = dmx_[std::size_t(i)], dp = dpx_[std::size_t(i)];
        const double flux = hf_(0.5 * (dm + dp)) - 0.5 * alpha_[0] * (dp - dm);
        out[std::size_t(i)] = vpot_[std::size_t(i)] - flux - lambda_ * w[std::size_t(i)];
      }
    } else {
      dmx_.resize(std::size_t(n));
      dpx_.resize(std::size_t(n));
      const double invh = 1.0 / h;
      for (int iy = 0; iy < n; ++iy) {
        const std::size_t off = std::size_t(n) * iy;
        const double* um2 = w.data() + std::size_t(n) * ((iy - 2 + n) % n);
        const double* um1 = w.data() + std::size_t(n) * ((iy - 1 + n) % n);
        const double* u0 = w.data() + off;
        const double* up1 = w.data() + std::size_t(n) * ((iy + 1) % n);
        const double* up2 = w.data() + std::size_t(n) * ((iy + 2) % n);
        const double* vrow = vpot_.data() + off;
        double* orow = out.data() + off;
        if (first_order_) {
          for (int ix = 0; ix < n; ++ix) {
            const int xm = ix == 0 ? n - 1 : ix - 1;
            const int xp = ix + 1 == n ? 0 : ix + 1;
            const double dmx = (u0[ix] - u0[xm]) * invh;
            const double dpx = (u0[xp] - u0[ix]) * invh;
            const double dmy = (u0[ix] - um1[ix]) * invh;
            const double dpy = (up1[ix] - u0[ix]) * invh;
            const double flux = hf_(0.5 * (dmx + dpx), 0.5 * (dmy + dpy)) - 0.5 * alpha_[0] * (dpx - dmx) -
                                0.5 * alpha_[1] * (dpy - dmy);
            orow[ix] = vrow[ix] - flux - lambda_ * u0[ix];
          }
          continue;
        }
        weno::line(w.data() + off, n, h, dmx_.data(), dpx_.data(), pad_.data());
        for (int ix = 0; ix < n; ++ix) {
          const double d0 = um1[ix] - um2[ix];
          const double d1 = u0[ix] - um1[ix];
          const double d2 = up1[ix] - u0[ix];
          const double e2 = up2[ix] - up1[ix];
          const double dmy = weno::biased_minus(d0, d1, d2, inv2h);
          const double dpy = weno::biased_plus(d1, d2, e2, inv2h);
          const double dmx = dmx_[std::size_t(ix)], dpx = dpx_[std::size_t(ix)];
          const double flux = hf_(0.5 * (dmx + dpx), 0.5 * (dmy + dpy)) - 0.5 * alpha_[0] * (dpx - dmx) -
                              0.5 * alpha_[1] * (dpy - dmy);
          orow[ix] = vrow[ix] - flux - lambda_ * u0[ix];
        }
      }
    }
  }

  /// One SSP-RK3 step in place; reports the extrema of the update.
  StepStats step(std::vector<double>& w, double dt) {
    const std::size_t m = w.size();
    s1_.resize(m);
    s2_.resize(m);
    k_.resize(m);
    rhs(w, k_);
    for (std::size_t i = 0; i < m; ++i) s1_[i] = w[i] + dt * k_[i];
    rhs(s1_, k_);
    for (std::size_t i = 0; i < m; ++i) s2_[i] = 0.75 * w[i] + 0.25 * (s1_[i] + dt * k_[i]);
    rhs(s2_, k_);
    StepStats st;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < m; ++i) {
      const double wn = (1.0 / 3.0) * w[i] + (2.0 / 3.0) * (s2_[i] + dt * k_[i]);
      const double d = wn - w[i];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      w[i] = wn;
    }
    st.dmin = lo;
    st.dmax = hi;
    return st;
  }

 private:
  TorusGrid g_;
  HF hf_;
  const std::vector<double>& vpot_;
  std::array<double, 2> alpha_;
  double lambda_;
  bool first_order_ = false;
  std::vector<double> pad_, dmx_, dpx_, s1_, s2_, k_;
};

/// Binds p and the Hamiltonian into a per-node gradient functor q -> H(p+q).
template <class Fn>
void dispatch_h1(const HamiltonianSpec& H, std::span<const double> p, Fn&& fn) {
  const double p0 = p[0];
  switch (H.kind) {
    case HamiltonianSpec::Kind::radial: {
      RadialEval ev(H.profile.pl);
      fn([=](double q) { return ev(std::abs(p0 + q)); });
      return;
    }
    case HamiltonianSpec::Kind::piece: {
      RadialEval ev(H.piece_fn);
      fn([=](double q) { return ev(std::abs(p0 + q)); });
      return;
    }
    case HamiltonianSpec::Kind::double_well: {
      const double a = H.offset[0];
      fn([=](double q) { return std::min(std::abs(p0 + q - a), std::abs(p0 + q + a)); });
      return;
    }
  }
  throw std::logic_error("dispatch_h1: bad kind");
}

template <class Fn>
void dispatch_h2(const HamiltonianSpec& H, std::span<const double> p, Fn&& fn) {
  const double p0 = p[0], p1 = p[1];
  switch (H.kind) {
    case HamiltonianSpec::Kind::radial: {
      RadialEval ev(H.profile.pl);
      fn([=](double q0, double q1) {
        const double x = p0 + q0, y = p1 + q1;
        return ev(std::sqrt(x * x + y * y));
      });
      return;
    }
    case HamiltonianSpec::Kind::piece: {
      RadialEval ev(H.piece_fn);
      fn([=](double q0, double q1) {
        const double x = p0 + q0, y = p1 + q1;
        return ev(std::sqrt(x * x + y * y));
      });
      return;
    }
    case HamiltonianSpec::Kind::double_well: {
      const double a0 = H.offset[0], a1 = H.offset[1];
      fn([=](double q0, double q1) {
        const double x = p0 + q0, y = p1 + q1;
        const double dm = (x - a0) * (x - a0) + (y - a1) * (y - a1);
        const double dp = (x + a0) * (x + a0) + (y + a1) * (y + a1);
        return std::sqrt(std::min(dm, dp));
      });
      return;
    }
  }
  throw std::logic_error("dispatch_h2: bad kind");
}

inline double outer_scale(const HamiltonianSpec& H) {
  switch (H.kind) {
    case HamiltonianSpec::Kind::radial: return H.profile.max_knot_radius();
    case HamiltonianSpec::Kind::piece: return H.piece_fn.r.back();
    case HamiltonianSpec::Kind::double_well: return std::hypot(H.offset[0], H.offset[1]);
  }
  return 1.0;
}

}  // namespace detail

/// Per-axis LF dissipation coefficients for the solve at momentum p.
inline std::array<double, 2> lf_alpha(const HamiltonianSpec& H, std::span<const double> p, double osc_v,
                                      const SolverConfig& cfg) {
  double pr = 0.0;
  for (double x : p) pr += x * x;
  double radius = cfg.p_box_radius > 0.0 ? cfg.p_box_radius : std::sqrt(pr) + osc_v + detail::outer_scale(H) + 1.0;
  double a = cfg.alpha_margin * H.lipschitz(radius);
  return {a, a};
}

struct BigTResult {
  double hbar = 0.0;
  bool converged = false;
  long steps = 0;
  double t_end = 0.0;
  double slope_change = std::numeric_limits<double>::infinity();
  double residual = 0.0;
  std::vector<double> estimates;  // one trailing-window estimate per elapsed window
};

inline Field initial_field(const TorusGrid& g, SolverConfig::Init init) {
  Field w(g);
  if (init == SolverConfig::Init::cosine) {
    constexpr double tau = 2.0 * std::numbers::pi;
    if (g.dim == 1) {
      for (int i = 0; i < g.n; ++i) w.a[std::size_t(i)] = std::cos(tau * i * g.h());
    } else {
      for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix)
          w.a[std::size_t(ix) + std::size_t(g.n) * iy] = std::cos(tau * ix * g.h()) * std::sin(tau * iy * g.h());
    }
  }
  return w;
}

/// Integrates  w_t + H(p + Dw) - V(x) = 0  (periodic recast of the big-T
/// flow) by LF/WENO3/SSP-RK3 and tracks the running estimator
/// Hhat_k = -(mean(t_k) - mean(t_k - window)) / window.
///
/// vpot must hold the potential sampled on g and already normalized to
/// min 0; the caller restores shifts. Terminates when min_consec successive
/// window estimates agree within tol_slope, when the update becomes a
/// uniform translation (discrete steady state), or at t_max (flagged
/// unconverged).
inline BigTResult evolve_bigT(const HamiltonianSpec& H, const std::vector<double>& vpot,
                              std::span<const double> p, const TorusGrid& g, const SolverConfig& cfg,
                              double osc_v, const Field* warm = nullptr, Field* final_field = nullptr,
                              double lambda = 0.0) {
  cfg.validate();
  if (!H.coercive() && lambda == 0.0)
    throw std::invalid_argument("evolve_bigT: noncoercive Hamiltonian (route decreasing pieces via duality)");
  if (H.dim != g.dim) throw std::invalid_argument("evolve_bigT: dimension mismatch");

  const std::array<double, 2> alpha = lf_alpha(H, p, osc_v, cfg);
  const double alpha_sum = g.dim == 1 ? alpha[0] : alpha[0] + alpha[1];
  const double dt_raw = cfg.cfl * g.h() / std::max(alpha_sum, 1e-300);
  const long per_window = std::max(1L, long(std::ceil(cfg.window / dt_raw)));
  const double dt = cfg.window / double(per_window);

  Field w = warm ? *warm : initial_field(g, cfg.init);
  if (warm && !(w.grid == g)) throw std::invalid_argument("evolve_bigT: warm-start grid mismatch");

  BigTResult res;
  auto march = [&](auto& op) {
    double mean_prev = spatial_mean(w.a);
    double d_prev = std::numeric_limits<double>::quiet_NaN();  // previous estimate change
    double est_prev = std::numeric_limits<double>::quiet_NaN();
    int agree = 0;
    const long max_windows = std::max(1L, long(std::ceil(cfg.t_max / cfg.window)));
    for (long k = 1; k <= max_windows; ++k) {
      for (long s = 0; s < per_window; ++s) {
        detail::StepStats st = op.step(w.a, dt);
        ++res.steps;
        if (!std::isfinite(st.dmax) || !std::isfinite(st.dmin)) throw NumericalInstability(res.steps * dt);
        const double spread = st.dmax - st.dmin;
        if (lambda == 0.0 && spread < cfg.steady_eps * std::max(1.0, std::abs(st.dmax))) {
          // uniform translation: the trailing slope can no longer change
          const double c = 0.5 * (st.dmax + st.dmin);
          res.hbar = -c / dt;
          res.converged = true;
          res.t_end = res.steps * dt;
          res.residual = spread / dt;
          res.slope_change = 0.0;
          res.estimates.push_back(res.hbar);
          return;
        }
      }
      const double mean_k = spatial_mean(w.a);
      const double est = -(mean_k - mean_prev) / cfg.window;
      res.estimates.push_back(est);
      mean_prev = mean_k;
      res.t_end = res.steps * dt;
      if (!std::isnan(est_prev)) {
        const double d = est - est_prev;
        res.slope_change = std::abs(d);
        // a small change alone can mask a slow one-sided creep toward the
        // limit; project the geometric tail d*rho/(1-rho) and require it
        // below tolerance as well
        bool ok = res.slope_change < cfg.tol_slope;
        if (ok && res.slope_change > 0.05 * cfg.tol_slope && !std::isnan(d_prev) && d * d_prev > 0.0) {
          const double rho = d / d_prev;
          if (rho >= 0.95) ok = false;
          else if (rho > 0.0) ok = res.slope_change * rho / (1.0 - rho) < cfg.tol_slope;
        }
        agree = ok ? agree + 1 : 0;
        if (agree >= cfg.min_consec - 1) {
          res.hbar = est;
          res.converged = true;
          res.residual = res.slope_change;
          return;
        }
        d_prev = d;
      }
      est_prev = est;
    }
    res.hbar = res.estimates.empty() ? 0.0 : res.estimates.back();
    res.converged = false;
    res.residual = res.slope_change;
  };

  const bool lf1 = cfg.scheme == SolverConfig::Scheme::lf1;
  if (g.dim == 1) {
    detail::dispatch_h1(H, p, [&](auto hf) {
      detail::LfOperator<1, decltype(hf)> op(g, hf, vpot, alpha, lambda, lf1);
      march(op);
    });
  } else {
    detail::dispatch_h2(H, p, [&](auto hf) {
      detail::LfOperator<2, decltype(hf)> op(g, hf, vpot, alpha, lambda, lf1);
      march(op);
    });
  }
  if (final_field) *final_field = std::move(w);
  return res;
}

/// Effective Hamiltonian at a single momentum. The potential is normalized
/// to min 0 internally and the shift is restored on output.
inline BigTResult big_t_effective(const HamiltonianSpec& H, const PotentialSpec& V, std::span<const double> p,
                                  const TorusGrid& g, const SolverConfig& cfg, const Field* warm = nullptr,
                                  Field* final_field = nullptr) {
  PotentialStats ex = potential_extrema(V);
  Field vf = sample_potential(V, g);
  for (double& x : vf.a) x -= ex.min;
  BigTResult r = evolve_bigT(H, vf.a, p, g, cfg, ex.osc, warm, final_field);
  r.hbar -= ex.min;
  for (double& e : r.estimates) e -= ex.min;
  return r;
}

struct DiscountedResult {
  Field v;
  double residual = 0.0;  // ||v_next - v||_inf / dt at exit
  bool converged = false;
  long steps = 0;
};

/// Marches  v_t + lambda v + H(p + Dv) - V = 0  to its steady state, the
/// bounded solution of the discounted ergodic problem. Convergence:
/// ||v^{n+1}-v^n||_inf / dt < tol_slope * lambda within t_max / lambda.
inline DiscountedResult discounted_value(const HamiltonianSpec& H, const PotentialSpec& V,
                                         std::span<const double> p, double lambda, const TorusGrid& g,
                                         const SolverConfig& cfg, const Field* warm = nullptr) {
  if (!(lambda > 0.0)) throw std::invalid_argument("discounted_value: lambda must be positive");
  cfg.validate();
  if (H.dim != g.dim) throw std::invalid_argument("discounted_value: dimension mismatch");

  PotentialStats ex = potential_extrema(V);
  Field vf = sample_potential(V, g);

  const std::array<double, 2> alpha = lf_alpha(H, p, ex.osc, cfg);
  const double alpha_sum = g.dim == 1 ? alpha[0] : alpha[0] + alpha[1];
  const double dt = cfg.cfl * g.h() / std::max(alpha_sum, 1e-300);

  DiscountedResult out;
  out.v = warm ? *warm : Field(g);
  const long max_steps = long(std::ceil(cfg.t_max / lambda / dt));
  const double stop = cfg.tol_slope * lambda;

  auto march = [&](auto& op) {
    for (long s = 0; s < max_steps; ++s) {
      detail::StepStats st = op.step(out.v.a, dt);
      ++out.steps;
      if (!std::isfinite(st.dmax) || !std::isfinite(st.dmin)) throw NumericalInstability(out.steps * dt);
      out.residual = std::max(std::abs(st.dmax), std::abs(st.dmin)) / dt;
      if (out.residual < stop) {
        out.converged = true;
        return;
      }
    }
  };

  const bool lf1 = cfg.scheme == SolverConfig::Scheme::lf1;
  if (g.dim == 1) {
    detail::dispatch_h1(H, p, [&](auto hf) {
      detail::LfOperator<1, decltype(hf)> op(g, hf, vf.a, alpha, lambda, lf1);
      march(op);
    });
  } else {
    detail::dispatch_h2(H, p, [&](auto hf) {
      detail::LfOperator<2, decltype(hf)> op(g, hf, vf.a, alpha, lambda, lf1);
      march(op);
    });
  }
  return out;
}

}  // namespace effham
