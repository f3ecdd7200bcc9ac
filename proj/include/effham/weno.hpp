#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "effham/grid.hpp"

namespace effham {

namespace weno {

constexpr double kEps = 1e-6;

/// Left-biased third-order reconstruction of u_x from the undivided
/// differences d0 = u[i-1]-u[i-2], d1 = u[i]-u[i-1], d2 = u[i+1]-u[i].
/// Smoothness weights: gamma0=1/3 on the far stencil, 2/3 central; the
/// fraction is cleared to a single division.
inline double biased_minus(double d0, double d1, double d2, double inv2h) {
  const double b0 = kEps + (d1 - d0) * (d1 - d0);
  const double b1 = kEps + (d2 - d1) * (d2 - d1);
  const double n0 = b1 * b1;            // ~ gamma0 weight numerator (x3)
  const double n1 = 2.0 * (b0 * b0);    // gamma1 = 2*gamma0
  const double w0 = n0 / (n0 + n1);
  return ((d1 + d2) + w0 * (2.0 * d1 - d0 - d2)) * inv2h;
}

/// Right-biased counterpart from e0 = u[i]-u[i-1], e1 = u[i+1]-u[i],
/// e2 = u[i+2]-u[i+1].
inline double biased_plus(double e0, double e1, double e2, double inv2h) {
  const double b0 = kEps + (e2 - e1) * (e2 - e1);
  const double b1 = kEps + (e1 - e0) * (e1 - e0);
  const double n0 = b1 * b1;
  const double n1 = 2.0 * (b0 * b0);
  const double w0 = n0 / (n0 + n1);
  return ((e0 + e1) + w0 * (2.0 * e1 - e0 - e2)) * inv2h;
}

/// Periodic line kernel: fills dm, dp (size n) from the contiguous values u.
/// pad must have room for n+5 entries of scratch.
inline void line(const double* u, int n, double h, double* dm, double* dp, double* pad) {
  // ghost layout: pad[j] = u[(j-2) mod n], j = 0 .. n+4
  for (int j = 0; j < n + 5; ++j) {
    int i = (j - 2) % n;
    if (i < 0) i += n;
    pad[j] = u[i];
  }
  const double inv2h = 0.5 / h;
  for (int i = 0; i < n; ++i) {
    const double* c = pad + i + 2;  // c[0] = u[i]
    const double d0 = c[-1] - c[-2];
    const double d1 = c[0] - c[-1];
    const double d2 = c[1] - c[0];
    const double e2 = c[2] - c[1];
    dm[i] = biased_minus(d0, d1, d2, inv2h);
    dp[i] = biased_plus(d1, d2, e2, inv2h);
  }
}

}  // namespace weno

/// One-sided WENO3 gradients of w along the given axis (0 or 1), with
/// periodic wraparound. Returns (left-biased, right-biased).
inline std::pair<Field, Field> weno3_gradients(const Field& w, int axis) {
  const TorusGrid& g = w.grid;
  if (g.n < 5) throw std::invalid_argument("weno3_gradients: need at least 5 points per dimension");
  if (axis < 0 || axis >= g.dim) throw std::invalid_argument("weno3_gradients: axis out of range");
  Field dm(g), dp(g);
  const double h = g.h();
  std::vector<double> pad(std::size_t(g.n) + 5);

  if (g.dim == 1) {
    weno::line(w.a.data(), g.n, h, dm.a.data(), dp.a.data(), pad.data());
    return {dm, dp};
  }

  const int n = g.n;
  if (axis == 0) {
    for (int iy = 0; iy < n; ++iy) {
      const std::size_t off = std::size_t(n) * iy;
      weno::line(w.a.data() + off, n, h, dm.a.data() + off, dp.a.data() + off, pad.data());
    }
  } else {
    const double inv2h = 0.5 / h;
    for (int iy = 0; iy < n; ++iy) {
      const double* um2 = w.a.data() + std::size_t(n) * ((iy - 2 + n) % n);
      const double* um1 = w.a.data() + std::size_t(n) * ((iy - 1 + n) % n);
      const double* u0 = w.a.data() + std::size_t(n) * iy;
      const double* up1 = w.a.data() + std::size_t(n) * ((iy + 1) % n);
      const double* up2 = w.a.data() + std::size_t(n) * ((iy + 2) % n);
      double* dmr = dm.a.data() + std::size_t(n) * iy;
      double* dpr = dp.a.data() + std::size_t(n) * iy;
      for (int ix = 0; ix < n; ++ix) {
        const double d0 = um1[ix] - um2[ix];
        const double d1 = u0[ix] - um1[ix];
        const double d2 = up1[ix] - u0[ix];
        const double e2 = up2[ix] - up1[ix];
        dmr[ix] = weno::biased_minus(d0, d1, d2, inv2h);
        dpr[ix] = weno::biased_plus(d1, d2, e2, inv2h);
      }
    }
  }
  return {dm, dp};
}

}  // namespace effham
