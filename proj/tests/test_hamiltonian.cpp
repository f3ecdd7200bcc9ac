#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "effham/hamiltonian.hpp"

using namespace effham;

TEST_CASE("ridge_radial matches its closed form min{4|p|, 2||p|-1|+1}") {
  HamiltonianSpec h = presets::ridge_radial(2);
  auto closed = [](double p1, double p2) {
    const double r = std::hypot(p1, p2);
    return std::min(4.0 * r, 2.0 * std::abs(r - 1.0) + 1.0);
  };
  CHECK(h.eval2(0.0, 0.0) == 0.0);
  CHECK(h.eval2(1.0, 0.0) == 1.0);   // ring-minimum level m1
  CHECK(h.eval2(0.5, 0.0) == 2.0);   // ridge level M1
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 2000; ++k) {
    const double p1 = u(rng), p2 = u(rng);
    REQUIRE(h.eval2(p1, p2) == Catch::Approx(closed(p1, p2)).margin(1e-14));
  }
}

TEST_CASE("double well vanishes at its wells and is 1 at the origin") {
  HamiltonianSpec h = presets::double_well(2);
  CHECK(h.eval2(1.0, 0.0) == 0.0);
  CHECK(h.eval2(-1.0, 0.0) == 0.0);
  CHECK(h.eval2(0.0, 0.0) == 1.0);
  CHECK(h.eval2(0.0, 1.0) == Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("catalog Hamiltonians are even to the last bit") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (const HamiltonianSpec& h : {presets::ridge_radial(2), presets::double_well(2), presets::ring_min(2),
                                   presets::eikonal(2), presets::triple_well(2)}) {
    for (int k = 0; k < 500; ++k) {
      const double p1 = u(rng), p2 = u(rng);
      REQUIRE(h.eval2(p1, p2) == h.eval2(-p1, -p2));
    }
  }
  HamiltonianSpec h1 = presets::ridge_radial(1);
  for (int k = 0; k < 500; ++k) {
    const double p = u(rng);
    REQUIRE(h1.eval1(p) == h1.eval1(-p));
  }
}

TEST_CASE("dimension mismatch is rejected") {
  HamiltonianSpec h = presets::eikonal(2);
  const double p = 0.5;
  CHECK_THROWS(h.eval(std::span<const double>(&p, 1)));
}

TEST_CASE("lipschitz bounds respect the restriction radius") {
  HamiltonianSpec h = presets::ridge_radial(2);
  CHECK(h.lipschitz(10.0) == 4.0);
  CHECK(h.lipschitz(0.3) == 4.0);     // inner cone alone
  CHECK(presets::double_well(2).lipschitz(100.0) == 1.0);
}

TEST_CASE("decreasing piece kind is flagged noncoercive") {
  PiecewiseLinear down({0.0, 1.0}, {3.0, 2.0}, -1.0);
  HamiltonianSpec h = HamiltonianSpec::piece(down, false, 2);
  CHECK_FALSE(h.coercive());
  CHECK(h.eval2(0.0, 0.0) == 3.0);
  HamiltonianSpec up = HamiltonianSpec::piece(down.negate(), true, 2);
  CHECK(up.coercive());
  CHECK(up.eval2(0.0, 0.0) == -3.0);
}
