// Command-line driver: configuration ingestion, sweep orchestration, table
// persistence and contour export. Subcommands: sweep, decompose, diagnose,
// discount, contour. Exit codes: 0 complete, 1 error, 2 diagnostic failures.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "effham/config.hpp"
#include "effham/contour.hpp"
#include "effham/pipeline.hpp"

using namespace effham;
using nlohmann::json;

namespace {

std::string scale_tag(double s) { return fmt_g(s); }

std::string hex_hash(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void stamp(EffectiveTable& t, const RunConfig& rc, double S) {
  t.meta["config_hash"] = hex_hash(rc.config_hash);
  t.meta["scale"] = fmt_g(S);
  t.meta["solver"] = solver_tag(rc.solver);
  t.meta["hamiltonian"] = rc.hamiltonian.name;
  t.meta["potential"] = rc.potential.name();
  t.meta["grid_n"] = std::to_string(rc.grid.n);
}

json report_to_json(const DiagnosticReport& rep) {
  json j;
  j["kind"] = DiagnosticReport::kind_name(rep.kind);
  j["pass"] = rep.pass;
  j["defect"] = rep.defect;
  j["tolerance"] = rep.tolerance;
  j["excluded_nodes"] = rep.excluded_nodes;
  if (!rep.note.empty()) j["note"] = rep.note;
  json w = json::array();
  for (const auto& x : rep.witnesses) w.push_back({x[0], x[1], x[2]});
  j["witnesses"] = w;
  return j;
}

struct Runner {
  RunConfig rc;
  TableCache cache;

  Runner(RunConfig rc_, bool fresh)
      : rc(std::move(rc_)), cache(fresh ? "" : rc.out_dir + "/cache") {
    std::filesystem::create_directories(rc.out_dir);
  }

  std::string key(const std::string& name) const {
    return name + "_" + rc.hamiltonian.name + "_" + rc.potential.name() + "_N" + std::to_string(rc.grid.n) +
           "_P" + std::to_string(rc.pgrid.samples) + "_" + solver_tag(rc.solver);
  }

  EffectiveTable direct(double S) {
    EffectiveTable t = cache.get(key("direct_S" + scale_tag(S)), [&]() {
      return sweep(rc.hamiltonian, rc.potential_at(S), rc.pgrid, rc.grid, rc.solver);
    });
    stamp(t, rc, S);
    return t;
  }

  ComposedRun composed(double S) {
    ComposedRun run = composed_pipeline(rc.hamiltonian, rc.potential_at(S), rc.pgrid, rc.grid, rc.solver,
                                        cache, key("piece_S" + scale_tag(S)));
    stamp(run.composed, rc, S);
    return run;
  }
};

int cmd_sweep(Runner& r) {
  for (double S : r.rc.scales) {
    EffectiveTable t = r.direct(S);
    const std::string path = r.rc.out_dir + "/direct_S" + scale_tag(S) + ".csv";
    write_table(t, path);
    std::cout << "wrote " << path << "\n";
  }
  return 0;
}

int cmd_decompose(Runner& r) {
  if (r.rc.hamiltonian.kind != HamiltonianSpec::Kind::radial) {
    std::cerr << "decompose: the composed pipeline needs a radial Hamiltonian\n";
    return 1;
  }
  json plan_j;
  for (double S : r.rc.scales) {
    ComposedRun run = r.composed(S);
    for (std::size_t j = 0; j < run.piece_tables.size(); ++j) {
      EffectiveTable pt = run.piece_tables[j];
      stamp(pt, r.rc, S);
      const std::string path =
          r.rc.out_dir + "/piece" + std::to_string(j) + "_S" + scale_tag(S) + ".csv";
      write_table(pt, path);
    }
    const std::string path = r.rc.out_dir + "/composed_S" + scale_tag(S) + ".csv";
    write_table(run.composed, path);
    std::cout << "wrote " << path << " (+" << run.piece_tables.size() << " piece tables)\n";

    if (plan_j.empty()) {
      plan_j["profile_class"] = int(run.plan.profile_class);
      plan_j["m"] = run.plan.m;
      plan_j["min_levels"] = run.plan.min_levels;
      plan_j["max_levels"] = run.plan.max_levels;
      plan_j["extension_slopes"] = run.plan.extension_slopes;
      json pieces = json::array();
      for (const ProfilePiece& piece : run.plan.pieces) {
        json pj;
        pj["increasing"] = piece.increasing;
        pj["native_lo"] = piece.native_lo;
        pj["native_hi"] = std::isfinite(piece.native_hi) ? json(piece.native_hi) : json("inf");
        pj["knots_r"] = piece.fn.r;
        pj["knots_v"] = piece.fn.v;
        pj["tail_slope"] = piece.fn.tail_slope;
        pieces.push_back(pj);
      }
      plan_j["pieces"] = pieces;
      plan_j["config_hash"] = hex_hash(r.rc.config_hash);
    }
  }
  std::ofstream out(r.rc.out_dir + "/plan.json");
  out << plan_j.dump(2) << "\n";
  std::cout << "wrote " << r.rc.out_dir << "/plan.json\n";
  return 0;
}

int cmd_diagnose(Runner& r, const std::string& check, const std::vector<double>& levels,
                 const std::vector<double>& lambdas_cli) {
  json out;
  out["config_hash"] = hex_hash(r.rc.config_hash);
  json results = json::array();
  bool any_fail = false;
  auto record = [&](double S, const DiagnosticReport& rep) {
    json j = report_to_json(rep);
    j["scale"] = S;
    results.push_back(j);
    any_fail = any_fail || !rep.pass;
  };

  const bool all = check == "all";
  if (!all && check != "evenness" && check != "quasiconvexity" && check != "levelset" &&
      check != "flatpart" && check != "flimit" && check != "discount") {
    std::cerr << "diagnose: unknown check '" << check << "'\n";
    return 1;
  }

  if (check == "discount") {
    const std::vector<double>& lams = lambdas_cli.empty() ? r.rc.lambdas : lambdas_cli;
    for (double S : r.rc.scales) {
      for (double pv : r.rc.discount_p) {
        std::vector<double> p(std::size_t(r.rc.grid.dim), 0.0);
        p[0] = pv;
        record(S, discounted_consistency(r.rc.hamiltonian, r.rc.potential_at(S),
                                         std::span<const double>(p.data(), p.size()), lams, r.rc.grid,
                                         r.rc.solver));
      }
    }
  } else {
    std::vector<EffectiveTable> tables;
    for (double S : r.rc.scales) tables.push_back(r.direct(S));

    for (std::size_t k = 0; k < r.rc.scales.size(); ++k) {
      const double S = r.rc.scales[k];
      const EffectiveTable& t = tables[k];
      if (all || check == "evenness") record(S, evenness_defect(t));
      if (all || check == "quasiconvexity") record(S, quasiconvexity_check(t));
      if (all || check == "flatpart") record(S, flat_part(t));
      if (check == "levelset")
        for (double mu : levels) record(S, levelset_convexity(t, mu));
    }
    if (all || check == "flimit") {
      if (r.rc.hamiltonian.kind == HamiltonianSpec::Kind::double_well &&
          r.rc.potential.kind == PotentialSpec::Kind::sine_product && r.rc.scales.size() >= 2) {
        record(r.rc.scales.back(), compare_flimit(tables, r.rc.scales));
      } else if (check == "flimit") {
        std::cerr << "flimit: needs the double_well Hamiltonian with the sine_product potential\n";
        return 1;
      }
    }
  }

  out["results"] = results;
  const std::string path = r.rc.out_dir + "/diagnose.json";
  std::ofstream f(path);
  f << out.dump(2) << "\n";
  std::cout << "wrote " << path << "\n";
  for (const auto& j : results)
    std::cout << "  " << j["kind"].get<std::string>() << " S=" << j["scale"].get<double>() << " "
              << (j["pass"].get<bool>() ? "pass" : "FAIL") << " defect=" << j["defect"].get<double>() << "\n";
  return any_fail ? 2 : 0;
}

int cmd_contour(const std::string& table_path, const std::vector<double>& levels, const std::string& out_dir) {
  EffectiveTable t = read_table(table_path);
  std::filesystem::create_directories(out_dir);
  json out = json::array();
  for (const ContourSet& cs : contours(t, levels)) {
    json cj;
    cj["level"] = cs.level;
    json lines = json::array();
    for (const Polyline& line : cs.polylines) {
      json lj = json::array();
      for (const auto& v : line) lj.push_back({v[0], v[1]});
      lines.push_back(lj);
    }
    cj["polylines"] = lines;
    out.push_back(cj);
  }
  json doc;
  doc["source"] = table_path;
  if (auto it = t.meta.find("config_hash"); it != t.meta.end()) doc["config_hash"] = it->second;
  doc["contours"] = out;
  const std::string path = out_dir + "/contours.json";
  std::ofstream f(path);
  f << doc.dump(2) << "\n";
  std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"effective Hamiltonians of coercive nonconvex H(p) - V(x) on the torus"};
  app.require_subcommand(1);

  std::string config_path, out_override, check = "all", table_path;
  std::vector<double> levels, lambdas;
  bool fresh = false;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file")->required();
    cmd->add_option("--out", out_override, "override the output directory");
    cmd->add_flag("--fresh", fresh, "ignore cached tables");
  };

  CLI::App* c_sweep = app.add_subcommand("sweep", "direct big-T sweeps over the momentum lattice");
  add_config(c_sweep);
  CLI::App* c_dec = app.add_subcommand("decompose", "piece sweeps plus the min-max composition");
  add_config(c_dec);
  CLI::App* c_diag = app.add_subcommand("diagnose", "structural diagnostics on the sweep tables");
  add_config(c_diag);
  c_diag->add_option("--check", check, "evenness|quasiconvexity|levelset|flatpart|flimit|discount|all");
  c_diag->add_option("--levels", levels, "levels for the levelset check")->delimiter(',');
  c_diag->add_option("--lambda", lambdas, "discount rates")->delimiter(',');
  CLI::App* c_disc = app.add_subcommand("discount", "discounted-approximation consistency runs");
  add_config(c_disc);
  c_disc->add_option("--lambda", lambdas, "discount rates (decreasing)")->delimiter(',');
  CLI::App* c_cont = app.add_subcommand("contour", "marching-squares contour export for a table");
  c_cont->add_option("table", table_path, "table CSV produced by sweep/decompose")->required();
  c_cont->add_option("--levels", levels, "contour levels")->delimiter(',')->required();
  c_cont->add_option("--out", out_override, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_cont->parsed()) return cmd_contour(table_path, levels, out_override);

    RunConfig rc = parse_config_file(config_path);
    if (!out_override.empty()) rc.out_dir = out_override;
    Runner runner(std::move(rc), fresh);
    if (c_sweep->parsed()) return cmd_sweep(runner);
    if (c_dec->parsed()) return cmd_decompose(runner);
    if (c_diag->parsed()) return cmd_diagnose(runner, check, levels, lambdas);
    if (c_disc->parsed()) return cmd_diagnose(runner, "discount", levels, lambdas);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
