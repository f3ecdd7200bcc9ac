#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "effham/weno.hpp"

using namespace effham;

namespace {

Field sample_1d(int n, double (*f)(double)) {
  Field w(TorusGrid(1, n));
  for (int i = 0; i < n; ++i) w.a[std::size_t(i)] = f(double(i) / n);
  return w;
}

double max_err_one_sided(int n) {
  constexpr double tau = 2.0 * std::numbers::pi;
  Field w = sample_1d(n, [](double x) { return std::sin(2.0 * std::numbers::pi * x); });
  auto [dm, dp] = weno3_gradients(w, 0);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double exact = tau * std::cos(tau * i / n);
    worst = std::max(worst, std::abs(dm.a[std::size_t(i)] - exact));
    worst = std::max(worst, std::abs(dp.a[std::size_t(i)] - exact));
  }
  return worst;
}

}  // namespace

TEST_CASE("constant fields have zero gradients") {
  Field w(TorusGrid(1, 32), 3.7);
  auto [dm, dp] = weno3_gradients(w, 0);
  for (int i = 0; i < 32; ++i) {
    CHECK(dm.a[std::size_t(i)] == 0.0);
    CHECK(dp.a[std::size_t(i)] == 0.0);
  }
  Field w2(TorusGrid(2, 16), -1.25);
  for (int axis : {0, 1}) {
    auto [a, b] = weno3_gradients(w2, axis);
    for (double v : a.a) CHECK(v == 0.0);
    for (double v : b.a) CHECK(v == 0.0);
  }
}

TEST_CASE("smooth convergence study reaches at least order 2.5") {
  const double e100 = max_err_one_sided(100);
  const double e200 = max_err_one_sided(200);
  const double e400 = max_err_one_sided(400);
  const double o1 = std::log2(e100 / e200);
  const double o2 = std::log2(e200 / e400);
  INFO("errors " << e100 << " " << e200 << " " << e400 << " orders " << o1 << " " << o2);
  CHECK(o1 >= 2.5);
  CHECK(o2 >= 2.5);
  CHECK(e400 < 1e-5);
}

TEST_CASE("kink: one-sided gradients bracket the slopes without overshoot") {
  const int n = 200;
  Field w = sample_1d(n, [](double x) { return std::abs(x - 0.5); });
  auto [dm, dp] = weno3_gradients(w, 0);
  const double eps = 0.1;
  for (int i = 0; i < n; ++i) {
    CHECK(dm.a[std::size_t(i)] >= -1.0 - eps);
    CHECK(dm.a[std::size_t(i)] <= 1.0 + eps);
    CHECK(dp.a[std::size_t(i)] >= -1.0 - eps);
    CHECK(dp.a[std::size_t(i)] <= 1.0 + eps);
  }
  // right at the kink the two biases see the two slopes
  const int k = n / 2;
  CHECK(dm.a[std::size_t(k)] == Catch::Approx(-1.0).margin(eps));
  CHECK(dp.a[std::size_t(k)] == Catch::Approx(1.0).margin(eps));
}

TEST_CASE("2-D gradients act axis by axis and refine") {
  constexpr double tau = 2.0 * std::numbers::pi;
  auto worst_err = [&](int n) {
    Field w(TorusGrid(2, n));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        w.a[std::size_t(i) + std::size_t(n) * j] = std::sin(tau * i / n) + 2.0 * std::cos(tau * j / n);
    auto [dmx, dpx] = weno3_gradients(w, 0);
    auto [dmy, dpy] = weno3_gradients(w, 1);
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double gx = tau * std::cos(tau * i / n);
        const double gy = -2.0 * tau * std::sin(tau * j / n);
        worst = std::max(worst, std::abs(dmx.a[std::size_t(i) + std::size_t(n) * j] - gx));
        worst = std::max(worst, std::abs(dpx.a[std::size_t(i) + std::size_t(n) * j] - gx));
        worst = std::max(worst, std::abs(dmy.a[std::size_t(i) + std::size_t(n) * j] - gy));
        worst = std::max(worst, std::abs(dpy.a[std::size_t(i) + std::size_t(n) * j] - gy));
      }
    return worst;
  };
  const double e64 = worst_err(64);
  const double e128 = worst_err(128);
  CHECK(e64 < 5e-2);
  CHECK(e128 < e64 / 4.0);  // at least second order in the max norm
}

TEST_CASE("grid too small is rejected") {
  Field w(TorusGrid(1, 4));
  CHECK_THROWS(weno3_gradients(w, 0));
}
