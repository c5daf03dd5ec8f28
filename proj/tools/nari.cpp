// Batch front end: reads a scenario JSON, dispatches to the solvers and
// writes deterministic JSON/CSV artifacts.
//
//   nari <solve|latitude|equilibrium|sweep|region|compare>
//        --scenario <path> --out <dir> [--verify] [--step <delta>]
//
// Exit codes: 0 success, 1 input or numeric error, 2 assumption violation.
// Diagnostics go to stderr as a single JSON line.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "nari/serialization.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Scenario {
  nari::ModelSpec model;
  nari::Technology technology = nari::Technology::Personalized;
  std::vector<std::uint32_t> chi_columns;
  json raw;
  nari::SolverOptions opt;
  unsigned long long seed = 0;
};

Scenario load_scenario(const std::string& path) {
  if (!fs::exists(path)) throw nari::ValidationError("scenario not found: " + path);
  std::ifstream in(path);
  json j;
  in >> j;
  Scenario sc;
  sc.raw = j;
  sc.model = j.at("model").get<nari::ModelSpec>();
  if (j.contains("technology"))
    sc.technology = nari::technology_from_string(j.at("technology").get<std::string>());
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (t.contains("tol_root")) sc.opt.tol_root = t.at("tol_root").get<double>();
    if (t.contains("tol_bind")) sc.opt.tol_bind = t.at("tol_bind").get<double>();
    if (t.contains("max_iter")) sc.opt.max_iter = t.at("max_iter").get<int>();
  }
  if (j.contains("seed")) sc.seed = j.at("seed").get<unsigned long long>();

  const int n = sc.model.n_types();
  if (!j.contains("configuration")) {
    sc.chi_columns = sc.technology == nari::Technology::Broadcast
                         ? nari::broadcast_star_columns(n)
                         : nari::independent_star_columns(n);
  } else if (j.at("configuration").is_string()) {
    const std::string kind = j.at("configuration").get<std::string>();
    if (kind == "broadcast") {
      sc.chi_columns = nari::broadcast_star_columns(n);
    } else if (kind == "independent") {
      sc.chi_columns = nari::independent_star_columns(n);
    } else if (kind == "draw") {
      if (!j.contains("seed"))
        throw nari::ValidationError("configuration \"draw\" requires a \"seed\" field");
      std::mt19937_64 rng(sc.seed);
      for (int attempt = 0; attempt < 400 && sc.chi_columns.empty(); ++attempt) {
        const auto cols =
            nari::draw_consistent_configuration(sc.model, sc.technology, rng, sc.opt);
        if (cols) sc.chi_columns = *cols;
      }
      if (sc.chi_columns.empty())
        throw nari::NumericError("no consistent configuration draw was accepted");
    } else {
      throw nari::ValidationError("unknown configuration kind: " + kind);
    }
  } else {
    const auto cfg = j.at("configuration").get<nari::NewsConfiguration>();
    if (cfg.n_rows != n)
      throw nari::ValidationError("configuration rows do not match the model's type count");
    sc.chi_columns = cfg.columns;
  }
  return sc;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

double required_policy(const Scenario& sc) {
  if (!sc.raw.contains("policy"))
    throw nari::ValidationError("scenario is missing the \"policy\" field");
  return sc.raw.at("policy").get<double>();
}

int cmd_solve(const Scenario& sc, const fs::path& out) {
  const double a = required_policy(sc);
  json signals = json::array();
  std::string a2_diag;
  if (sc.technology == nari::Technology::Broadcast) {
    const nari::BroadcastSolveResult b = nari::optimal_broadcast_signal(sc.model, a, sc.opt);
    write_json(out / "broadcast.json", json(b));
    for (int k = -sc.model.K; k <= sc.model.K; ++k) {
      json row(b.solve);
      row["k"] = k;
      signals.push_back(row);
    }
    if (b.solve.regime == nari::SolveRegime::Degenerate) a2_diag = "degenerate signal";
    else if (b.excludes_voter) a2_diag = "voter excluded";
    else if (b.solve.regime == nari::SolveRegime::FullDisclosure || b.solve.boundary)
      a2_diag = "posterior at boundary";
  } else {
    for (int k = -sc.model.K; k <= sc.model.K; ++k) {
      const nari::SignalSolveResult r = nari::solve_signal(sc.model, sc.technology, a, k, sc.opt);
      json row(r);
      row["k"] = k;
      signals.push_back(row);
      if (a2_diag.empty()) {
        if (r.regime == nari::SolveRegime::Degenerate) a2_diag = "degenerate signal";
        else if (r.regime == nari::SolveRegime::FullDisclosure || r.boundary ||
                 !r.signal || r.signal->mu_L() <= -1.0 || r.signal->mu_R() >= 1.0)
          a2_diag = "posterior at boundary";
        else if (!nari::check_strict_obedience(*r.signal, sc.model, a, k))
          a2_diag = "obedience violated";
      }
    }
  }
  write_json(out / "signals.json", signals);
  if (!a2_diag.empty()) throw nari::AssumptionError(a2_diag);
  write_json(out / "skewness.json", json(nari::skewness_report(sc.model, a, sc.opt)));
  return 0;
}

int cmd_latitude(const Scenario& sc, const fs::path& out) {
  if (!sc.raw.contains("coalition"))
    throw nari::ValidationError("scenario is missing the \"coalition\" field");
  const auto coalition = sc.raw.at("coalition").get<std::vector<int>>();
  const nari::LatitudeReport rep =
      nari::policy_latitude(sc.model, sc.technology, coalition, sc.opt);
  write_json(out / "latitude.json", json(rep));
  return 0;
}

int cmd_equilibrium(const Scenario& sc, const fs::path& out, bool verify, double step) {
  const nari::EquilibriumSet eq = nari::equilibrium_set(sc.model, sc.technology, sc.chi_columns,
                                                        sc.model.populations, sc.opt);
  json j(eq);
  if (verify) {
    const nari::BruteForceResult brute = nari::brute_force_equilibrium(
        sc.model, sc.technology, sc.chi_columns, sc.model.populations, step, sc.opt);
    j["verify"] = {{"a_star_brute", brute.a_max},
                   {"step", brute.step},
                   {"delta", std::fabs(brute.a_max - eq.a_star)}};
  }
  write_json(out / "equilibrium.json", j);
  return 0;
}

int cmd_sweep(const Scenario& sc, const fs::path& out) {
  if (!sc.raw.contains("lambdas"))
    throw nari::ValidationError("scenario is missing the \"lambdas\" field");
  const auto lambdas = sc.raw.at("lambdas").get<std::vector<double>>();
  const nari::SweepReport rep = nari::lambda_sweep(sc.model, lambdas, sc.opt);
  write_json(out / "sweep.json", json(rep));
  std::string csv = "lambda,a_broadcast,a_personalized\n";
  for (const auto& row : rep.rows) {
    csv += nari::format_double(row.lambda);
    csv += ',';
    csv += row.evaluable_broadcast ? nari::format_double(row.a_broadcast) : std::string("na");
    csv += ',';
    csv += row.evaluable_personalized ? nari::format_double(row.a_personalized)
                                      : std::string("na");
    csv += '\n';
  }
  write_text(out / "sweep.csv", csv);
  return 0;
}

int cmd_region(const Scenario& sc, const fs::path& out) {
  if (!sc.raw.contains("axes"))
    throw nari::ValidationError("scenario is missing the \"axes\" field");
  const nari::Axis x = sc.raw.at("axes").at("x").get<nari::Axis>();
  const nari::Axis y = sc.raw.at("axes").at("y").get<nari::Axis>();
  std::vector<std::string> checks = {"assumption2", "star", "doublestar"};
  if (sc.raw.contains("checks")) checks = sc.raw.at("checks").get<std::vector<std::string>>();
  const nari::RegionGrid grid = nari::region_scan(sc.model, x, y, checks, sc.opt);
  write_text(out / "region.csv", nari::region_csv(grid));
  write_json(out / "region.json", json(grid));
  return 0;
}

int cmd_compare(const Scenario& sc, const fs::path& out) {
  const nari::PersonalizationReport rep = nari::compare_personalization(sc.model, sc.opt);
  write_json(out / "compare.json", json(rep));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"news-aggregation polarization solver"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  bool verify = false;
  double step = 1e-3;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "scenario JSON path")->required();
    cmd->add_option("--out", out_dir, "output directory");
  };
  CLI::App* solve = app.add_subcommand("solve", "optimal signals at a fixed policy");
  CLI::App* latitude = app.add_subcommand("latitude", "policy latitude of a coalition");
  CLI::App* equilibrium = app.add_subcommand("equilibrium", "symmetric equilibrium policy set");
  CLI::App* sweep = app.add_subcommand("sweep", "marginal attention cost sweep");
  CLI::App* region = app.add_subcommand("region", "condition region scan");
  CLI::App* compare = app.add_subcommand("compare", "broadcast vs personalized polarization");
  for (CLI::App* cmd : {solve, latitude, equilibrium, sweep, region, compare}) add_common(cmd);
  equilibrium->add_flag("--verify", verify, "cross-check against the lattice scan");
  equilibrium->add_option("--step", step, "lattice step for --verify");

  CLI11_PARSE(app, argc, argv);

  auto fail = [](int code, const std::string& kind, const std::string& what) {
    std::cerr << json{{"error", what}, {"kind", kind}}.dump() << "\n";
    return code;
  };

  try {
    const Scenario sc = load_scenario(scenario_path);
    const fs::path out(out_dir);
    if (app.got_subcommand(solve)) return cmd_solve(sc, out);
    if (app.got_subcommand(latitude)) return cmd_latitude(sc, out);
    if (app.got_subcommand(equilibrium)) return cmd_equilibrium(sc, out, verify, step);
    if (app.got_subcommand(sweep)) return cmd_sweep(sc, out);
    if (app.got_subcommand(region)) return cmd_region(sc, out);
    if (app.got_subcommand(compare)) return cmd_compare(sc, out);
    return fail(1, "input", "no subcommand");
  } catch (const nari::AssumptionError& e) {
    return fail(2, "assumption", e.what());
  } catch (const nari::HalfTieError& e) {
    return fail(1, "input", e.what());
  } catch (const nari::ValidationError& e) {
    return fail(1, "input", e.what());
  } catch (const nari::NumericError& e) {
    return fail(1, "numeric", e.what());
  } catch (const json::exception& e) {
    return fail(1, "input", e.what());
  } catch (const std::exception& e) {
    return fail(1, "numeric", e.what());
  }
}
