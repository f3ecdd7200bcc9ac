#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "effham/grid.hpp"

namespace effham {

/// Periodic potential-energy catalog. Every kind is continuous and
/// 1-periodic in each coordinate; the scale S multiplies the whole shape.
struct PotentialSpec {
  enum class Kind { zero, constant, sine_product, sine_squares, asym_sine, triangle_1d, tabulated };

  Kind kind = Kind::zero;
  int dim = 1;
  double scale = 0.0;   // S
  double c0 = 1.0;      // triangle amplitude
  double s = 0.5;       // triangle apex location, in (0,1)
  double value = 0.0;   // constant kind
  Field table;          // tabulated kind

  static PotentialSpec zero(int dim) {
    PotentialSpec v;
    v.kind = Kind::zero;
    v.dim = dim;
    return v;
  }
  static PotentialSpec constant(int dim, double value) {
    PotentialSpec v;
    v.kind = Kind::constant;
    v.dim = dim;
    v.value = value;
    return v;
  }
  static PotentialSpec sine_product(double S) {
    PotentialSpec v;
    v.kind = Kind::sine_product;
    v.dim = 2;
    v.scale = S;
    return v;
  }
  static PotentialSpec sine_squares(double S) {
    PotentialSpec v;
    v.kind = Kind::sine_squares;
    v.dim = 2;
    v.scale = S;
    return v;
  }
  static PotentialSpec asym_sine(double S) {
    PotentialSpec v;
    v.kind = Kind::asym_sine;
    v.dim = 2;
    v.scale = S;
    return v;
  }
  static PotentialSpec triangle(double S, double c0, double s) {
    if (!(c0 > 0.0) || !(s > 0.0 && s < 1.0))
      throw std::invalid_argument("triangle potential: need c0 > 0 and s in (0,1)");
    PotentialSpec v;
    v.kind = Kind::triangle_1d;
    v.dim = 1;
    v.scale = S;
    v.c0 = c0;
    v.s = s;
    return v;
  }
  static PotentialSpec tabulated(Field f) {
    PotentialSpec v;
    v.kind = Kind::tabulated;
    v.dim = f.grid.dim;
    v.table = std::move(f);
    return v;
  }

  std::string name() const {
    switch (kind) {
      case Kind::zero: return "zero";
      case Kind::constant: return "constant";
      case Kind::sine_product: return "sine_product";
      case Kind::sine_squares: return "sine_squares";
      case Kind::asym_sine: return "asym_sine";
      case Kind::triangle_1d: return "triangle_1d";
      case Kind::tabulated: return "tabulated";
    }
    return "?";
  }

  double eval(std::span<const double> x) const {
    if (int(x.size()) != dim) throw std::invalid_argument("eval_potential: dimension mismatch");
    constexpr double tau = 2.0 * std::numbers::pi;
    auto frac = [](double t) { return t - std::floor(t); };
    switch (kind) {
      case Kind::zero: return 0.0;
      case Kind::constant: return value;
      case Kind::sine_product:
        return scale * (1.0 + std::sin(tau * x[0])) * (1.0 + std::sin(tau * x[1]));
      case Kind::sine_squares: {
        double s1 = std::sin(tau * x[0]), s2 = std::sin(tau * x[1]);
        return scale * (s1 * s1 + s2 * s2);
      }
      case Kind::asym_sine:
        return scale * (3.0 + std::sin(tau * x[0]) + std::sin(2.0 * tau * x[0]) + std::sin(tau * x[1]));
      case Kind::triangle_1d: {
        double t = frac(x[0]);
        return scale * c0 * std::min(t / s, (1.0 - t) / (1.0 - s));
      }
      case Kind::tabulated: {
        // nearest-node lookup; tabulated inputs live on their own grid
        const TorusGrid& g = table.grid;
        if (dim == 1) return table.at(int(std::lround(frac(x[0]) * g.n)));
        return table.at(int(std::lround(frac(x[0]) * g.n)), int(std::lround(frac(x[1]) * g.n)));
      }
    }
    return 0.0;
  }

  double eval1(double x) const { return eval(std::span<const double>(&x, 1)); }
  double eval2(double x1, double x2) const {
    const double x[2] = {x1, x2};
    return eval(std::span<const double>(x, 2));
  }

  bool has_analytic_extrema() const { return kind != Kind::tabulated; }

  double analytic_min() const {
    switch (kind) {
      case Kind::zero: return 0.0;
      case Kind::constant: return value;
      case Kind::sine_product: return 0.0;
      case Kind::sine_squares: return 0.0;
      case Kind::asym_sine: return scale * (2.0 - asym_peak());
      case Kind::triangle_1d: return 0.0;
      case Kind::tabulated: return grid_min();
    }
    return 0.0;
  }

  double analytic_max() const {
    switch (kind) {
      case Kind::zero: return 0.0;
      case Kind::constant: return value;
      case Kind::sine_product: return 4.0 * scale;
      case Kind::sine_squares: return 2.0 * scale;
      case Kind::asym_sine: return scale * (4.0 + asym_peak());
      case Kind::triangle_1d: return scale * c0;
      case Kind::tabulated: return grid_max();
    }
    return 0.0;
  }

  double oscillation() const { return analytic_max() - analytic_min(); }

 private:
  /// max of sin(u) + sin(2u): attained where cos u = (sqrt(33)-1)/8.
  static double asym_peak() {
    const double c = (std::sqrt(33.0) - 1.0) / 8.0;
    return std::sqrt(1.0 - c * c) * (1.0 + 2.0 * c);
  }
  double grid_min() const {
    double m = table.a[0];
    for (double v : table.a) m = std::min(m, v);
    return m;
  }
  double grid_max() const {
    double m = table.a[0];
    for (double v : table.a) m = std::max(m, v);
    return m;
  }
};

inline double eval_potential(const PotentialSpec& v, std::span<const double> x) { return v.eval(x); }

/// Samples the potential on grid nodes.
inline Field sample_potential(const PotentialSpec& v, const TorusGrid& g) {
  if (v.dim != g.dim) throw std::invalid_argument("sample_potential: dimension mismatch");
  Field f(g);
  const double h = g.h();
  if (g.dim == 1) {
    for (int i = 0; i < g.n; ++i) f.a[std::size_t(i)] = v.eval1(i * h);
  } else {
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix) f.a[std::size_t(ix) + std::size_t(g.n) * iy] = v.eval2(ix * h, iy * h);
  }
  return f;
}

struct PotentialStats {
  double min = 0.0;
  double max = 0.0;
  double osc = 0.0;
};

/// Grid extrema of the potential (exact for catalog kinds up to the grid's
/// modulus of continuity).
inline PotentialStats potential_stats(const PotentialSpec& v, const TorusGrid& g) {
  Field f = sample_potential(v, g);
  PotentialStats st;
  st.min = f.a[0];
  st.max = f.a[0];
  for (double x : f.a) {
    st.min = std::min(st.min, x);
    st.max = std::max(st.max, x);
  }
  st.osc = st.max - st.min;
  return st;
}

/// Extrema used for normalization and hypothesis thresholds: analytic values
/// for catalog kinds, grid values for tabulated data.
inline PotentialStats potential_extrema(const PotentialSpec& v) {
  PotentialStats st;
  st.min = v.analytic_min();
  st.max = v.analytic_max();
  st.osc = st.max - st.min;
  return st;
}

}  // namespace effham
