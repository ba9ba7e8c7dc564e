// scalex — matrix scaling toolkit: Sinkhorn-Knopp solver, concentration-bound
// evaluators, and the random-matrix convergence experiments.
//
// Exit codes: 0 success, 1 invalid input / I/O error, 2 numeric failure
// (solver non-convergence, experiment aborted on trial failures).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scalex/bounds.hpp"
#include "scalex/csv.hpp"
#include "scalex/ensembles.hpp"
#include "scalex/experiments.hpp"
#include "scalex/marginals.hpp"
#include "scalex/serialize.hpp"
#include "scalex/sinkhorn.hpp"
#include "scalex/spectral.hpp"

namespace fs = std::filesystem;
using namespace scalex;

namespace {

struct MarginalFlags {
  std::string row_sums_path;
  std::string col_sums_path;
  std::size_t ds_n = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--row-sums", row_sums_path, "row-sum targets (single-line CSV)");
    cmd->add_option("--col-sums", col_sums_path, "column-sum targets (single-line CSV)");
    cmd->add_option("--ds-n", ds_n, "shortcut: doubly-stochastic targets of size N");
  }

  Marginals load() const {
    if (ds_n > 0) {
      if (!row_sums_path.empty() || !col_sums_path.empty())
        throw std::invalid_argument("give either --ds-n or --row-sums/--col-sums, not both");
      return Marginals::uniform(ds_n, ds_n);
    }
    if (row_sums_path.empty() || col_sums_path.empty())
      throw std::invalid_argument("marginals required: --row-sums and --col-sums, or --ds-n");
    return Marginals(read_vector_csv(row_sums_path), read_vector_csv(col_sums_path));
  }
};

int cmd_scale(const std::string& matrix_path, const std::string& row_sums_path,
              const std::string& col_sums_path, double tol, std::size_t max_iters,
              const std::string& out_dir) {
  PositiveMatrix a(read_matrix_csv(matrix_path));
  Marginals m(read_vector_csv(row_sums_path), read_vector_csv(col_sums_path));
  ScalingSolution sol = sinkhorn_knopp(a, m, tol, max_iters);

  fs::create_directories(out_dir);
  write_vector_csv((fs::path(out_dir) / "x.csv").string(), sol.x);
  write_vector_csv((fs::path(out_dir) / "y.csv").string(), sol.y);
  write_matrix_csv((fs::path(out_dir) / "P.csv").string(), sol.scaled);

  std::cout << "iterations=" << sol.iterations
            << " final_margin_error=" << format_double17(sol.final_margin_error)
            << " converged=" << (sol.converged ? "true" : "false") << '\n';
  return sol.converged ? 0 : 2;
}

int cmd_experiment(char scenario, const std::vector<std::size_t>& grid, std::size_t trials,
                   std::uint64_t seed, double tol, std::size_t max_iters,
                   const std::string& out_dir, const std::string& format) {
  ScenarioConfig cfg;
  cfg.scenario = scenario_from_letter(scenario);
  if (!grid.empty()) cfg.n_values = grid;
  cfg.trials = trials;
  cfg.base_seed = seed;
  cfg.solver_tol = tol;
  cfg.max_iters = max_iters;

  ErrorCurve curve = run_scenario(cfg);

  fs::create_directories(out_dir);
  std::string stem = std::string("curve_") + scenario;
  {
    std::ofstream csv(fs::path(out_dir) / (stem + ".csv"));
    if (!csv) throw std::invalid_argument("cannot write into " + out_dir);
    write_curve_csv(csv, curve);
  }
  {
    std::ofstream json_out(fs::path(out_dir) / (stem + ".json"));
    if (!json_out) throw std::invalid_argument("cannot write into " + out_dir);
    json_out << to_json(curve).dump(2) << '\n';
  }
  {
    std::ofstream plot(fs::path(out_dir) / (std::string("plot_") + scenario + ".gp"));
    if (!plot) throw std::invalid_argument("cannot write into " + out_dir);
    write_plot_script(plot, stem + ".csv", scenario);
  }

  if (curve.n_values.size() < 3) {
    std::cout << "slope fit skipped (needs at least 3 grid points)\n";
    return 0;
  }
  SlopeFit fit_en = fit_loglog_slope(curve.n_values, curve.mean_en);
  SlopeFit fit_op = fit_loglog_slope(curve.n_values, curve.mean_operr);
  if (format == "json") {
    ojson j{{"scenario", std::string(1, scenario)},
            {"en_fit", to_json(fit_en)},
            {"operr_fit", to_json(fit_op)}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "scenario,measure,slope,intercept,r_squared\n";
    std::cout << scenario << ",en," << format_double17(fit_en.slope) << ','
              << format_double17(fit_en.intercept) << ',' << format_double17(fit_en.r_squared)
              << '\n';
    std::cout << scenario << ",operr," << format_double17(fit_op.slope) << ','
              << format_double17(fit_op.intercept) << ',' << format_double17(fit_op.r_squared)
              << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scalex: matrix scaling, concentration bounds, and convergence experiments"};
  app.require_subcommand(1);

  // --- scale ---
  std::string matrix_path, row_sums_path, col_sums_path, out_path = "scale_out";
  double tol = kDefaultSolverTol;
  std::size_t max_iters = kDefaultMaxIters;
  auto* scale_cmd = app.add_subcommand("scale", "scale a positive matrix to prescribed sums");
  scale_cmd->add_option("matrix", matrix_path, "matrix CSV")->required();
  scale_cmd->add_option("row-sums", row_sums_path, "row-sum targets (single-line CSV)")->required();
  scale_cmd->add_option("col-sums", col_sums_path, "column-sum targets (single-line CSV)")
      ->required();
  scale_cmd->add_option("--tol", tol, "margin tolerance");
  scale_cmd->add_option("--max-iters", max_iters, "iteration cap");
  scale_cmd->add_option("--out", out_path, "output directory for x.csv, y.csv, P.csv");

  // --- bounds ---
  auto* bounds_cmd = app.add_subcommand("bounds", "evaluate closed-form bounds (JSON to stdout)");
  bounds_cmd->require_subcommand(1);
  double env_a = 1.0, env_b = 1.0, env_d = 0.0, delta = 1.0, eps = 0.1, width = 0.0;
  double l3_s = 1.0, l3_min_r = 1.0, l3_min_c = 1.0, l3_c1 = 1.0, l3_c2 = 1.0;
  std::size_t l3_m = 1, l3_n = 1;
  std::optional<std::size_t> sel_row, sel_col;

  auto* rho_cmd = bounds_cmd->add_subcommand("rho", "marginal profile rho1, rho2, rho3");
  MarginalFlags rho_m;
  rho_m.attach(rho_cmd);

  auto* const_cmd = bounds_cmd->add_subcommand("constants", "concentration constants C_p, C_e");
  const_cmd->add_option("--a", env_a, "envelope min")->required();
  const_cmd->add_option("--b", env_b, "envelope max")->required();
  const_cmd->add_option("--d", env_d, "max envelope width")->required();

  auto* l1_cmd = bounds_cmd->add_subcommand("lemma1", "factor-ratio bounds (sqrt(a)/b, sqrt(b)/a)");
  l1_cmd->add_option("--a", env_a, "envelope min")->required();
  l1_cmd->add_option("--b", env_b, "envelope max")->required();

  auto* t2_cmd = bounds_cmd->add_subcommand("theorem2", "concentration report");
  t2_cmd->add_option("--a", env_a, "envelope min")->required();
  t2_cmd->add_option("--b", env_b, "envelope max")->required();
  t2_cmd->add_option("--d", env_d, "max envelope width")->required();
  t2_cmd->add_option("--delta", delta, "delta in (0,1]")->required();
  MarginalFlags t2_m;
  t2_m.attach(t2_cmd);

  auto* l2_cmd = bounds_cmd->add_subcommand("lemma2", "row/column-sum tail bound");
  l2_cmd->add_option("--a", env_a, "envelope min")->required();
  l2_cmd->add_option("--b", env_b, "envelope max")->required();
  l2_cmd->add_option("--width", width, "entry envelope width on the selected line")->required();
  l2_cmd->add_option("--eps", eps, "relative deviation")->required();
  auto* l2_row = l2_cmd->add_option("--row", sel_row, "row index");
  auto* l2_col = l2_cmd->add_option("--col", sel_col, "column index");
  l2_row->excludes(l2_col);
  MarginalFlags l2_m;
  l2_m.attach(l2_cmd);

  auto* l3_cmd = bounds_cmd->add_subcommand("lemma3", "stability under approximate scaling");
  l3_cmd->add_option("--eps", eps, "margin deviation in (0,1)")->required();
  l3_cmd->add_option("--a", env_a, "envelope min")->required();
  l3_cmd->add_option("--b", env_b, "envelope max")->required();
  l3_cmd->add_option("--s", l3_s, "total mass s")->required();
  l3_cmd->add_option("--m", l3_m, "row count M")->required();
  l3_cmd->add_option("--min-r", l3_min_r, "min row target")->required();
  l3_cmd->add_option("--n", l3_n, "column count N")->required();
  l3_cmd->add_option("--min-c", l3_min_c, "min column target")->required();
  l3_cmd->add_option("--c1", l3_c1, "lower bound on x_i / r_bar_i")->required();
  l3_cmd->add_option("--c2", l3_c2, "lower bound on y_j / c_bar_j")->required();

  // --- experiment ---
  char scenario = 'a';
  std::vector<std::size_t> grid;
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  std::string exp_out = "experiment_out", format = "csv";
  auto* exp_cmd = app.add_subcommand("experiment", "reproduce a convergence experiment");
  exp_cmd->add_option("--scenario", scenario, "scenario {a,b,c}")
      ->check(CLI::IsMember({'a', 'b', 'c'}));
  exp_cmd->add_option("--grid", grid, "comma-separated N values")->delimiter(',');
  exp_cmd->add_option("--trials", trials, "trials per N");
  exp_cmd->add_option("--seed", seed, "base seed");
  exp_cmd->add_option("--tol", tol, "solver tolerance");
  exp_cmd->add_option("--max-iters", max_iters, "solver iteration cap");
  exp_cmd->add_option("--out", exp_out, "output directory");
  exp_cmd->add_option("--format", format, "stdout summary format")
      ->check(CLI::IsMember({"csv", "json"}));

  // --- tail-check ---
  std::size_t tc_n = 100, tc_trials = 2000;
  double tc_eps = 0.5, tc_half_width = 0.5, tc_low = 1.5, tc_high = 2.5;
  std::uint64_t tc_seed = 1;
  auto* tc_cmd = app.add_subcommand("tail-check", "Monte-Carlo check of the row-sum tail bound");
  tc_cmd->add_option("--n", tc_n, "matrix size (doubly-stochastic N x N)");
  tc_cmd->add_option("--eps", tc_eps, "relative deviation")->required();
  tc_cmd->add_option("--trials", tc_trials, "Monte-Carlo trials");
  tc_cmd->add_option("--seed", tc_seed, "base seed");
  tc_cmd->add_option("--half-width", tc_half_width, "observation half-width");
  tc_cmd->add_option("--low", tc_low, "population interval low");
  tc_cmd->add_option("--high", tc_high, "population interval high");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // flag/usage problems are invalid input
  }

  try {
    if (*scale_cmd) return cmd_scale(matrix_path, row_sums_path, col_sums_path, tol, max_iters,
                                     out_path);
    if (*rho_cmd) {
      std::cout << to_json(rho_profile(rho_m.load())).dump(2) << '\n';
    } else if (*const_cmd) {
      if (!(env_a > 0.0) || env_b < env_a || env_d < 0.0 || env_d > env_b - env_a)
        throw std::invalid_argument("constants: need 0 < a <= b and 0 <= d <= b - a");
      double c_p = std::sqrt(2.0) * (env_b * env_d / (env_a * env_a));
      double c_e = 1.0 + 2.0 * std::pow(env_b / env_a, 3.5);
      std::cout << ojson{{"c_p", c_p}, {"c_e", c_e}}.dump(2) << '\n';
    } else if (*l1_cmd) {
      auto [lo, hi] = lemma1_bounds(env_a, env_b);
      std::cout << ojson{{"lower", lo}, {"upper", hi}}.dump(2) << '\n';
    } else if (*t2_cmd) {
      std::cout << to_json(theorem2_report(env_a, env_b, env_d, t2_m.load(), delta)).dump(2)
                << '\n';
    } else if (*l2_cmd) {
      if (!sel_row && !sel_col) throw std::invalid_argument("lemma2: give --row or --col");
      Axis axis = sel_row ? Axis::row : Axis::col;
      std::size_t index = sel_row ? *sel_row : *sel_col;
      double bound = lemma2_tail_uniform(env_a, env_b, width, l2_m.load(), eps, axis, index);
      std::cout << ojson{{"eps", eps}, {"bound", bound}}.dump(2) << '\n';
    } else if (*l3_cmd) {
      auto [row_bound, col_bound] =
          lemma3_bound(eps, env_a, env_b, l3_s, l3_m, l3_min_r, l3_n, l3_min_c, l3_c1, l3_c2);
      std::cout << ojson{{"row_bound", row_bound}, {"col_bound", col_bound}}.dump(2) << '\n';
    } else if (*exp_cmd) {
      return cmd_experiment(scenario, grid, trials, seed, tol, max_iters, exp_out, format);
    } else if (*tc_cmd) {
      PositiveMatrix population =
          gen_population(tc_n, tc_n, tc_low, tc_high, derive_seed(tc_seed, {0}));
      EnsembleBounds env = EnsembleBounds::around(population, tc_half_width);
      Marginals m = Marginals::uniform(tc_n, tc_n);
      TailCheckResult res = empirical_tail_check(env, m, tc_eps, tc_trials,
                                                 derive_seed(tc_seed, {1}));
      ojson j = to_json(res);
      j["eps"] = tc_eps;
      std::cout << j.dump(2) << '\n';
    }
    return 0;
  } catch (const ScenarioAbortError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
