#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include "effham/profile.hpp"

namespace effham {

/// Analytic Hamiltonian catalog: radial profiles H(p) = phi(|p|), the
/// double-well min{|p-a|, |p+a|}, and single monotone profile pieces
/// (decreasing pieces are noncoercive and must be solved through duality).
struct HamiltonianSpec {
  enum class Kind { radial, double_well, piece };

  Kind kind = Kind::radial;
  int dim = 1;
  RadialProfile profile;              // radial
  std::array<double, 2> offset{1.0, 0.0};  // double_well
  PiecewiseLinear piece_fn;           // piece
  bool piece_increasing = true;
  std::string name = "radial";

  static HamiltonianSpec radial(RadialProfile prof, int dim, std::string name = "radial") {
    HamiltonianSpec h;
    h.kind = Kind::radial;
    h.dim = dim;
    h.profile = std::move(prof);
    h.name = std::move(name);
    return h;
  }
  static HamiltonianSpec double_well(std::array<double, 2> a, int dim, std::string name = "double_well") {
    HamiltonianSpec h;
    h.kind = Kind::double_well;
    h.dim = dim;
    h.offset = a;
    h.name = std::move(name);
    return h;
  }
  static HamiltonianSpec piece(PiecewiseLinear fn, bool increasing, int dim, std::string name = "piece") {
    HamiltonianSpec h;
    h.kind = Kind::piece;
    h.dim = dim;
    h.piece_fn = std::move(fn);
    h.piece_increasing = increasing;
    h.name = std::move(name);
    return h;
  }
  static HamiltonianSpec piece(const ProfilePiece& p, int dim, std::string name = "piece") {
    return piece(p.fn, p.increasing, dim, std::move(name));
  }

  bool coercive() const { return kind != Kind::piece || piece_increasing; }
  bool even() const { return true; }  // every catalog kind is a function of |p| or symmetric wells

  double eval(std::span<const double> p) const {
    if (int(p.size()) != dim) throw std::invalid_argument("eval_hamiltonian: dimension mismatch");
    double r2 = 0.0;
    for (double x : p) r2 += x * x;
    switch (kind) {
      case Kind::radial: return profile.eval(std::sqrt(r2));
      case Kind::piece: return piece_fn.eval(std::sqrt(r2));
      case Kind::double_well: {
        double dm2 = 0.0, dp2 = 0.0;
        for (int i = 0; i < dim; ++i) {
          double a = offset[std::size_t(i)];
          dm2 += (p[std::size_t(i)] - a) * (p[std::size_t(i)] - a);
          dp2 += (p[std::size_t(i)] + a) * (p[std::size_t(i)] + a);
        }
        return std::sqrt(std::min(dm2, dp2));
      }
    }
    return 0.0;
  }

  double eval1(double p) const { return eval(std::span<const double>(&p, 1)); }
  double eval2(double p1, double p2) const {
    std::array<double, 2> p{p1, p2};
    return eval(std::span<const double>(p.data(), 2));
  }

  /// Per-axis Lipschitz bound of q -> H(q) over |q| <= radius.
  double lipschitz(double radius) const {
    switch (kind) {
      case Kind::radial: return profile.pl.max_abs_slope_within(radius);
      case Kind::piece: return piece_fn.max_abs_slope_within(radius);
      case Kind::double_well: return 1.0;
    }
    return 1.0;
  }

  double min_value() const {
    switch (kind) {
      case Kind::radial: return profile.min_value();
      case Kind::piece: return piece_increasing ? piece_fn.v.front() : -std::numeric_limits<double>::infinity();
      case Kind::double_well: return 0.0;
    }
    return 0.0;
  }
};

inline double eval_hamiltonian(const HamiltonianSpec& h, std::span<const double> p) { return h.eval(p); }

/// Catalog profiles used across the test problems.
namespace presets {

/// H(p) = slope * |p|
inline HamiltonianSpec eikonal(int dim, double slope = 1.0) {
  return HamiltonianSpec::radial(RadialProfile({0.0}, {0.0}, slope), dim, "eikonal");
}

/// Ring-shaped minimum: phi(0)=1 falling to 0 at r=1, then rising (two
/// segments to keep the tail interesting).
inline HamiltonianSpec ring_min(int dim) {
  return HamiltonianSpec::radial(RadialProfile({0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}, 3.0), dim, "ring_min");
}

/// Pit at the origin, ridge at r=1/2, higher ring minimum at r=1:
/// phi(r) = min{4r, 2|r-1|+1}.
inline HamiltonianSpec ridge_radial(int dim) {
  return HamiltonianSpec::radial(RadialProfile({0.0, 0.5, 1.0}, {0.0, 2.0, 1.0}, 2.0), dim, "ridge_radial");
}

/// Strictly ordered alternating profile with the deep well outside
/// (m = 1): phi(0)=1, peak 2 at r=1, zero at r=2.
inline HamiltonianSpec outer_well(int dim) {
  return HamiltonianSpec::radial(RadialProfile({0.0, 1.0, 2.0}, {1.0, 2.0, 0.0}, 3.0), dim, "outer_well");
}

/// m = 3 alternating profile with strictly ordered extrema chains.
inline HamiltonianSpec triple_well(int dim) {
  return HamiltonianSpec::radial(
      RadialProfile({0, 1, 2, 3, 4, 5, 6}, {1.5, 2.0, 1.0, 2.5, 0.5, 3.0, 0.0}, 5.0), dim, "triple_well");
}

inline HamiltonianSpec double_well(int dim) {
  return HamiltonianSpec::double_well({1.0, 0.0}, dim);
}

inline HamiltonianSpec by_name(const std::string& name, int dim) {
  if (name == "eikonal") return eikonal(dim);
  if (name == "ring_min") return ring_min(dim);
  if (name == "ridge_radial") return ridge_radial(dim);
  if (name == "outer_well") return outer_well(dim);
  if (name == "triple_well") return triple_well(dim);
  if (name == "double_well") return double_well(dim);
  throw std::invalid_argument("unknown hamiltonian preset: " + name);
}

}  // namespace presets

}  // namespace effham
