#include <catch2/catch_amalgamated.hpp>

#include "effham/config.hpp"

using namespace effham;

TEST_CASE("minimal 1-D eikonal config fills defaults") {
  RunConfig rc = parse_config(
      "[hamiltonian]\n"
      "preset = eikonal\n"
      "dimension = 1\n");
  CHECK(rc.hamiltonian.name == "eikonal");
  CHECK(rc.grid.n == 401);
  CHECK(rc.pgrid.samples == 41);
  CHECK(rc.potential.kind == PotentialSpec::Kind::zero);
  CHECK(rc.solver.cfl == 0.5);
  CHECK(rc.solver.t_max == 80.0);
  CHECK(rc.solver.window == 10.0);
  CHECK(rc.solver.tol_slope == 1e-3);
  CHECK(rc.solver.alpha_margin == 1.5);
  CHECK(rc.pipelines == std::set<std::string>{"direct"});
}

TEST_CASE("full 2-D reproduction config parses") {
  RunConfig rc = parse_config(
      "# threshold study\n"
      "[hamiltonian]\n"
      "preset = ridge_radial\n"
      "dimension = 2\n"
      "[potential]\n"
      "kind = sine_product\n"
      "[grid]\n"
      "n = 401\n"
      "[pgrid]\n"
      "samples = 21\n"
      "range = 1.0\n"
      "[solver]\n"
      "init = cosine\n"
      "cfl = 0.9\n"
      "[run]\n"
      "scales = 0.125, 0.25, 0.3, 0.5\n"
      "pipelines = direct, diagnostics\n"
      "out = runs/threshold\n");
  CHECK(rc.grid.n == 401);
  CHECK(rc.pgrid.samples == 21);
  CHECK(rc.scales == std::vector<double>{0.125, 0.25, 0.3, 0.5});
  CHECK(rc.solver.init == SolverConfig::Init::cosine);
  CHECK(rc.pipelines.count("diagnostics") == 1);
  CHECK(rc.out_dir == "runs/threshold");
  CHECK(rc.potential_at(0.25).scale == 0.25);
  CHECK(rc.config_hash != 0);
}

TEST_CASE("custom radial knots parse into a profile") {
  RunConfig rc = parse_config(
      "[hamiltonian]\n"
      "kind = radial\n"
      "knots = 0:0, 0.5:2, 1:1\n"
      "tail_slope = 2\n"
      "dimension = 2\n");
  CHECK(rc.hamiltonian.eval2(0.5, 0.0) == 2.0);
  CHECK(rc.hamiltonian.eval2(1.0, 0.0) == 1.0);
}

TEST_CASE("unknown keys and sections are rejected with the line number") {
  CHECK_THROWS_WITH(parse_config("[hamiltonian]\npreset = eikonal\nbogus = 1\n"),
                    Catch::Matchers::ContainsSubstring("line 3"));
  CHECK_THROWS_WITH(parse_config("[nonsense]\nx = 1\n"),
                    Catch::Matchers::ContainsSubstring("unknown section"));
}

TEST_CASE("typed errors name the key and expected type") {
  CHECK_THROWS_WITH(parse_config("[hamiltonian]\npreset = eikonal\n[grid]\nn = fast\n"),
                    Catch::Matchers::ContainsSubstring("integer"));
  CHECK_THROWS_WITH(parse_config("[hamiltonian]\npreset = eikonal\n[solver]\ncfl = maybe\n"),
                    Catch::Matchers::ContainsSubstring("real"));
  CHECK_THROWS_WITH(parse_config("[hamiltonian]\npreset = eikonal\n[run]\nscales = \n"),
                    Catch::Matchers::ContainsSubstring("list"));
}

TEST_CASE("semantic validation: even p-sample counts are refused") {
  CHECK_THROWS_WITH(parse_config("[hamiltonian]\npreset = eikonal\n[pgrid]\nsamples = 20\n"),
                    Catch::Matchers::ContainsSubstring("odd"));
}

TEST_CASE("dimension consistency between hamiltonian and potential") {
  CHECK_THROWS_WITH(parse_config("[hamiltonian]\npreset = eikonal\ndimension = 1\n"
                                 "[potential]\nkind = sine_product\n"),
                    Catch::Matchers::ContainsSubstring("dimension"));
  // triangle needs dimension 1
  CHECK_THROWS(parse_config("[hamiltonian]\npreset = double_well\ndimension = 2\n"
                            "[potential]\nkind = triangle_1d\n"));
}

TEST_CASE("unknown presets, kinds and pipelines are named in errors") {
  CHECK_THROWS_WITH(parse_config("[hamiltonian]\npreset = warp_drive\n"),
                    Catch::Matchers::ContainsSubstring("warp_drive"));
  CHECK_THROWS_WITH(parse_config("[hamiltonian]\npreset = eikonal\n[potential]\nkind = fog\n"),
                    Catch::Matchers::ContainsSubstring("fog"));
  CHECK_THROWS_WITH(parse_config("[hamiltonian]\npreset = eikonal\n[run]\npipelines = direct, warp\n"),
                    Catch::Matchers::ContainsSubstring("warp"));
}

TEST_CASE("config hash is stable and content-sensitive") {
  const std::string a = "[hamiltonian]\npreset = eikonal\n";
  const std::string b = "[hamiltonian]\npreset = ridge_radial\n";
  CHECK(parse_config(a).config_hash == parse_config(a).config_hash);
  CHECK(parse_config(a).config_hash != parse_config(b).config_hash);
}
