#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "effham/effective.hpp"
#include "effham/lf_solver.hpp"

using namespace effham;

TEST_CASE("lf_flux with equal one-sided gradients reproduces H(p+q) exactly") {
  HamiltonianSpec h = presets::ridge_radial(2);
  const double p[2] = {0.3, -0.2};
  const double q[2] = {0.7, 0.4};
  const double alpha[2] = {6.0, 6.0};
  const double got = lf_flux(h, std::span<const double>(p, 2), std::span<const double>(q, 2),
                             std::span<const double>(q, 2), std::span<const double>(alpha, 2));
  CHECK(got == h.eval2(p[0] + q[0], p[1] + q[1]));
}

TEST_CASE("hand-evaluated 1-D LF value: eikonal at a kink") {
  // H(p)=|p|, p=0, dm=-1, dp=1, alpha=1: |0| - (1/2)(1-(-1)) = -1
  HamiltonianSpec h = presets::eikonal(1);
  const double p = 0.0, dm = -1.0, dp = 1.0, alpha = 1.0;
  const double got = lf_flux(h, std::span<const double>(&p, 1), std::span<const double>(&dm, 1),
                             std::span<const double>(&dp, 1), std::span<const double>(&alpha, 1));
  CHECK(got == Catch::Approx(-1.0));
}

TEST_CASE("lf_flux monotonicity over 1e4 randomized samples") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> du(0.0, 0.5);
  HamiltonianSpec hs[] = {presets::ridge_radial(2), presets::double_well(2)};
  int violations = 0;
  for (int k = 0; k < 10000; ++k) {
    const HamiltonianSpec& h = hs[k % 2];
    const double alpha_v = h.lipschitz(1e9);
    const double p[2] = {u(rng), u(rng)};
    double dm[2] = {u(rng), u(rng)};
    double dp[2] = {u(rng), u(rng)};
    const double alpha[2] = {alpha_v, alpha_v};
    const double base = lf_flux(h, std::span<const double>(p, 2), std::span<const double>(dm, 2),
                                std::span<const double>(dp, 2), std::span<const double>(alpha, 2));
    const int axis = k % 2;
    const double delta = du(rng);
    // raising a right-biased gradient must not raise the flux
    dp[axis] += delta;
    const double up = lf_flux(h, std::span<const double>(p, 2), std::span<const double>(dm, 2),
                              std::span<const double>(dp, 2), std::span<const double>(alpha, 2));
    if (up > base + 1e-12) ++violations;
    dp[axis] -= delta;
    // raising a left-biased gradient must not lower it
    dm[axis] += delta;
    const double dn = lf_flux(h, std::span<const double>(p, 2), std::span<const double>(dm, 2),
                              std::span<const double>(dp, 2), std::span<const double>(alpha, 2));
    if (dn < base - 1e-12) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("zero potential: estimator returns H(p) to near machine precision") {
  SolverConfig cfg;
  TorusGrid g1(1, 101);
  HamiltonianSpec h1 = presets::ridge_radial(1);
  for (double p : {0.0, 0.35, -0.8, 1.0}) {
    BigTResult r = big_t_effective(h1, PotentialSpec::zero(1), std::span<const double>(&p, 1), g1, cfg);
    CHECK(r.converged);
    CHECK(r.hbar == Catch::Approx(h1.eval1(p)).margin(1e-10));
  }
  TorusGrid g2(2, 33);
  HamiltonianSpec h2 = presets::double_well(2);
  const double p2[2] = {0.4, -0.6};
  BigTResult r2 = big_t_effective(h2, PotentialSpec::zero(2), std::span<const double>(p2, 2), g2, cfg);
  CHECK(r2.converged);
  CHECK(r2.hbar == Catch::Approx(h2.eval2(p2[0], p2[1])).margin(1e-10));
}

TEST_CASE("1-D eikonal with triangle potential converges to the cell-problem value") {
  SolverConfig cfg;
  TorusGrid g(1, 401);
  HamiltonianSpec h = presets::eikonal(1);
  PotentialSpec v = PotentialSpec::triangle(1.0, 1.0, 1.0 / 3.0);
  const double p = 0.75;
  BigTResult r = big_t_effective(h, v, std::span<const double>(&p, 1), g, cfg);
  CHECK(r.converged);
  CHECK(r.hbar == Catch::Approx(0.25).margin(2e-2));  // max{0, 0.75 - 1/2}
  const double p0 = 0.25;
  BigTResult r0 = big_t_effective(h, v, std::span<const double>(&p0, 1), g, cfg);
  CHECK(r0.hbar == Catch::Approx(0.0).margin(2e-2));
}

TEST_CASE("grid refinement shrinks the eikonal-oracle error") {
  SolverConfig cfg;
  HamiltonianSpec h = presets::eikonal(1);
  PotentialSpec v = PotentialSpec::triangle(1.0, 1.0, 1.0 / 3.0);
  // inside the flat part the corrector has kinks, so the discretization
  // error dominates the stopping noise and the decrease is visible
  const double p = 0.4;
  const double oracle = oracle_1d_eikonal(v, p);
  double prev = 1e99;
  for (int n : {101, 201, 401}) {
    BigTResult r = big_t_effective(h, v, std::span<const double>(&p, 1), TorusGrid(1, n), cfg);
    const double err = std::abs(r.hbar - oracle);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("steps never create oscillation beyond the comparison bound") {
  // osc(w^{n+1}) <= osc(w^n) + dt * osc(V) for the monotone scheme
  TorusGrid g(1, 64);
  HamiltonianSpec h = presets::eikonal(1);
  PotentialSpec v = PotentialSpec::triangle(1.0, 1.0, 0.25);
  PotentialStats ex = potential_extrema(v);
  Field vf = sample_potential(v, g);

  SolverConfig cfg;
  const double p = 0.4;
  const std::array<double, 2> alpha = lf_alpha(h, std::span<const double>(&p, 1), v.oscillation(), cfg);
  const double dt = cfg.cfl * g.h() / alpha[0];

  Field w = initial_field(g, SolverConfig::Init::cosine);
  auto osc = [](const Field& f) {
    double lo = f.a[0], hi = f.a[0];
    for (double x : f.a) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    return hi - lo;
  };
  detail::dispatch_h1(h, std::span<const double>(&p, 1), [&](auto hf) {
    detail::LfOperator<1, decltype(hf)> op(g, hf, vf.a, alpha, 0.0);
    for (int s = 0; s < 200; ++s) {
      const double before = osc(w);
      op.step(w.a, dt);
      REQUIRE(osc(w) <= before + dt * ex.osc + 1e-12);
    }
  });
}

TEST_CASE("discounted solver: zero potential gives the constant -H(p)/lambda") {
  SolverConfig cfg;
  TorusGrid g(1, 51);
  HamiltonianSpec h = presets::ridge_radial(1);
  const double p = 0.6, lam = 0.5;
  DiscountedResult r = discounted_value(h, PotentialSpec::zero(1), std::span<const double>(&p, 1), lam, g, cfg);
  CHECK(r.converged);
  CHECK(lam * r.v.a[0] == Catch::Approx(-h.eval1(p)).margin(1e-3));
  // constant potential just shifts the level
  DiscountedResult rc =
      discounted_value(h, PotentialSpec::constant(1, 0.7), std::span<const double>(&p, 1), lam, g, cfg);
  CHECK(lam * rc.v.a[0] == Catch::Approx(-h.eval1(p) + 0.7).margin(1e-3));
  // bound: |lambda v| <= max |H(p+.) - V| over the sampled gradient range
  double bound = 0.0;
  for (int i = 0; i <= 100; ++i) bound = std::max(bound, std::abs(h.eval1(p)));
  CHECK(std::abs(lam * r.v.a[0]) <= bound + 1e-6);
}

TEST_CASE("identical inputs give bit-identical results") {
  SolverConfig cfg;
  TorusGrid g(2, 41);
  HamiltonianSpec h = presets::double_well(2);
  PotentialSpec v = PotentialSpec::sine_product(0.5);
  const double p[2] = {0.3, 0.1};
  BigTResult a = big_t_effective(h, v, std::span<const double>(p, 2), g, cfg);
  BigTResult b = big_t_effective(h, v, std::span<const double>(p, 2), g, cfg);
  CHECK(a.hbar == b.hbar);
  CHECK(a.steps == b.steps);
  CHECK(a.estimates == b.estimates);
}

TEST_CASE("noncoercive pieces are rejected by the direct solver") {
  PiecewiseLinear down({0.0, 1.0}, {2.0, 1.0}, -1.0);
  HamiltonianSpec h = HamiltonianSpec::piece(down, false, 1);
  SolverConfig cfg;
  const double p = 0.0;
  std::vector<double> vzero(31, 0.0);
  CHECK_THROWS(evolve_bigT(h, vzero, std::span<const double>(&p, 1), TorusGrid(1, 31), cfg, 0.0));
}
