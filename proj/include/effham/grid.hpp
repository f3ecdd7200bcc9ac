#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace effham {

/// Uniform periodic grid on [0,1)^dim, dim in {1,2}. Index arithmetic is
/// modulo n; node i sits at x = i*h with h = 1/n.
struct TorusGrid {
  int dim = 1;
  int n = 0;

  TorusGrid() = default;
  TorusGrid(int dim_, int n_) : dim(dim_), n(n_) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("TorusGrid: dim must be 1 or 2");
    if (n < 3) throw std::invalid_argument("TorusGrid: need at least 3 points per dimension");
  }

  double h() const { return 1.0 / n; }
  std::size_t size() const { return dim == 1 ? std::size_t(n) : std::size_t(n) * n; }
  int wrap(int i) const {
    i %= n;
    return i < 0 ? i + n : i;
  }
  bool operator==(const TorusGrid& o) const { return dim == o.dim && n == o.n; }
};

/// Real-valued grid function. 2-D storage is row-major with x1 contiguous:
/// a[ix + n*iy] holds the value at (ix*h, iy*h).
struct Field {
  TorusGrid grid;
  std::vector<double> a;

  Field() = default;
  explicit Field(const TorusGrid& g, double fill = 0.0) : grid(g), a(g.size(), fill) {}

  double& at(int ix) { return a[std::size_t(grid.wrap(ix))]; }
  double& at(int ix, int iy) { return a[std::size_t(grid.wrap(ix)) + std::size_t(grid.n) * grid.wrap(iy)]; }
  double at(int ix) const { return a[std::size_t(grid.wrap(ix))]; }
  double at(int ix, int iy) const { return a[std::size_t(grid.wrap(ix)) + std::size_t(grid.n) * grid.wrap(iy)]; }

  bool finite() const {
    for (double v : a)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Fixed-shape pairwise tree reduction. The summation order depends only on
/// the array length, so results are reproducible across runs and thread
/// counts.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline double spatial_mean(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size()) / double(v.size());
}

inline double spatial_mean(const Field& f) { return spatial_mean(f.a); }

}  // namespace effham
